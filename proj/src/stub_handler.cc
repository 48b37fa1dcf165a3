/* Copyright 2026 The Recast Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/


#include "recast/stub_handler.h"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "recast/error.h"
#include "recast/mask.h"
#include "recast/png_io.h"
#include "recast/stubs.h"

namespace recast {

namespace fs = std::filesystem;

namespace {

constexpr double kDefaultTau = 30.0;
constexpr int kDefaultInpaintIters = 200;
constexpr int kDefaultRingWidth = 4;

bool valid_request_id(const std::string& id) {
  if (id.empty() || id.size() > 128) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    if (!ok) return false;
  }
  return id != "." && id != "..";
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot read '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out.flush()) throw IoError("cannot write '" + path.string() + "'");
}

const std::string& artifact(const StageRequest& req, const std::string& name) {
  const auto it = req.artifacts.find(name);
  if (it == req.artifacts.end()) {
    throw ParamError("request is missing artifact '" + name + "'");
  }
  return it->second;
}

FrameSequence with_extra_frame(const FrameSequence& seq) {
  std::vector<Frame> frames = seq.frames();
  frames.push_back(frames.back());
  return FrameSequence(std::move(frames), seq.fps());
}

FrameSequence widened(const FrameSequence& seq) {
  std::vector<Frame> frames;
  for (const Frame& f : seq.frames()) {
    frames.emplace_back(f.width() + 1, f.height(), f.channels());
  }
  return FrameSequence(std::move(frames), seq.fps());
}

}  // namespace

Fault parse_fault(const std::string& name) {
  static const std::pair<const char*, Fault> kNames[] = {
      {"none", Fault::kNone},
      {"bad-version", Fault::kBadVersion},
      {"unknown-stage", Fault::kUnknownStage},
      {"wrong-length", Fault::kWrongLength},
      {"out-of-band", Fault::kOutOfBand},
      {"bad-grid", Fault::kBadGrid},
      {"missing-artifact", Fault::kMissingArtifact},
      {"wrong-id", Fault::kWrongId},
      {"malformed", Fault::kMalformed},
      {"error", Fault::kError},
      {"hang", Fault::kHang},
      {"crash", Fault::kCrash},
  };
  for (const auto& [n, f] : kNames) {
    if (name == n) return f;
  }
  throw ConfigError("unknown fault '" + name + "'");
}

StubHandler::StubHandler(StubOptions options) : options_(std::move(options)) {
  if (options_.personality != "stub" && options_.personality != "identity") {
    throw ConfigError("unknown stub personality '" + options_.personality + "'");
  }
}

void StubHandler::attach(const fs::path& workspace_root) {
  workspace_ = Workspace::open(workspace_root);
}

bool StubHandler::fault_applies(const std::string& stage) const {
  return options_.fault != Fault::kNone &&
         (options_.fault_stage.empty() || options_.fault_stage == stage);
}

Json StubHandler::ready() const {
  ReadyMessage ready;
  ready.max_batch = options_.max_batch;
  if (options_.personality == "identity") {
    ready.stages = {std::string(kHarmonizeParams)};
  } else {
    ready.stages.assign(kStageNames.begin(), kStageNames.end());
  }
  ready.stages.emplace_back(kEcho);
  Json j = ready_to_json(ready);
  if (options_.fault == Fault::kBadVersion) j["ready"]["protocol_version"] = 2;
  if (options_.fault == Fault::kUnknownStage) j["ready"]["stages"].push_back("teleport");
  return j;
}

std::optional<std::string> StubHandler::on_message(const std::string& line,
                                                   bool* shutdown) {
  Json msg;
  try {
    msg = parse_message(line);
  } catch (const ProtocolError& e) {
    StageResponse resp;
    resp.error_code = "ProtocolError";
    resp.error_message = e.what();
    return response_to_json(resp).dump();
  }
  if (msg.contains("shutdown")) {
    if (shutdown != nullptr) *shutdown = true;
    return std::nullopt;
  }
  if (msg.contains("hello")) {
    const Json& hello = msg["hello"];
    if (hello.is_object() && hello.contains("workspace") &&
        hello["workspace"].is_string()) {
      attach(hello["workspace"].get<std::string>());
    }
    return ready().dump();
  }

  StageRequest req;
  try {
    req = request_from_json(msg);
  } catch (const ProtocolError& e) {
    StageResponse resp;
    resp.request_id = msg.value("request_id", std::string());
    resp.error_code = "ProtocolError";
    resp.error_message = e.what();
    return response_to_json(resp).dump();
  }

  const bool faulty = fault_applies(req.stage);
  if (faulty) {
    switch (options_.fault) {
      case Fault::kHang:
        std::this_thread::sleep_for(std::chrono::hours(1));
        break;
      case Fault::kCrash:
        std::_Exit(3);
      case Fault::kMalformed:
        return std::string("{\"request_id\": \"") + req.request_id + "\", ok";
      default:
        break;
    }
  }
  StageResponse resp = invoke(req);
  if (faulty && options_.fault == Fault::kWrongId) resp.request_id += "-stale";
  return response_to_json(resp).dump();
}

StageResponse StubHandler::invoke(const StageRequest& req) {
  StageResponse resp;
  resp.request_id = req.request_id;
  const bool faulty = fault_applies(req.stage);
  if (faulty && options_.fault == Fault::kError) {
    resp.error_code = "InjectedFault";
    resp.error_message = "fault injected for stage " + req.stage;
    return resp;
  }
  try {
    resp.artifacts = run_stage(req, faulty);
    resp.ok = true;
  } catch (const Error& e) {
    resp.error_code = e.kind();
    resp.error_message = e.what();
  } catch (const std::exception& e) {
    resp.error_code = "InternalError";
    resp.error_message = e.what();
  }
  if (resp.ok && faulty && options_.fault == Fault::kMissingArtifact) {
    for (auto& [name, path] : resp.artifacts) path += ".missing";
  }
  return resp;
}

std::map<std::string, std::string> StubHandler::run_stage(
    const StageRequest& req, bool faulty) {
  if (!workspace_) throw ProtocolError("request before hello");
  if (!valid_request_id(req.request_id)) {
    throw ParamError("request_id must be a plain token");
  }
  if (req.stage == kEcho) return req.artifacts;
  const bool identity = options_.personality == "identity";
  if (identity && req.stage != kHarmonizeParams) {
    throw ParamError("identity worker only serves harmonize_params");
  }
  if (!is_known_stage(req.stage)) {
    throw ParamError("unknown stage '" + req.stage + "'");
  }

  const Workspace& ws = *workspace_;
  const std::string out_rel = "work/" + req.request_id + "/out";
  const fs::path out_dir = ws.resolve(out_rel);
  const Fault fault = faulty ? options_.fault : Fault::kNone;
  const Json& params = req.params;

  if (req.stage == kSegmentTrack) {
    const FrameSequence frames = ingest_frames(ws.resolve(artifact(req, "frames")));
    const Prompt prompt = prompt_from_json(params.at("prompt"));
    const double tau = params.value("tau", kDefaultTau);
    MaskSequence masks = stub_segment_track(frames, prompt, tau);
    if (fault == Fault::kWrongLength) {
      std::vector<Mask> more = masks.masks();
      more.push_back(more.back());
      masks = MaskSequence(std::move(more));
    } else if (fault == Fault::kOutOfBand) {
      std::vector<Mask> wide;
      for (const Mask& m : masks.masks()) wide.emplace_back(m.width() + 1, m.height());
      masks = MaskSequence(std::move(wide));
    }
    write_mask_sequence(out_dir / "masks.json", masks);
    return {{"masks", out_rel + "/masks.json"}};
  }

  if (req.stage == kInpaint) {
    const FrameSequence frames = ingest_frames(ws.resolve(artifact(req, "frames")));
    const MaskSequence masks = read_mask_sequence(ws.resolve(artifact(req, "masks")));
    const int iters = params.value("iters", kDefaultInpaintIters);
    FrameSequence out = stub_inpaint(frames, masks, iters);
    if (fault == Fault::kWrongLength) {
      out = with_extra_frame(out);
    } else if (fault == Fault::kOutOfBand) {
      // Flip the first pixel that lies outside the mask.
      std::vector<Frame> tampered = out.frames();
      for (std::size_t i = 0; i < tampered.size(); ++i) {
        bool done = false;
        for (int y = 0; y < masks.height() && !done; ++y) {
          for (int x = 0; x < masks.width() && !done; ++x) {
            if (!masks[i].get(x, y)) {
              tampered[i].pixel(x, y)[0] ^= 0xff;
              done = true;
            }
          }
        }
        if (done) break;
      }
      out = FrameSequence(std::move(tampered), out.fps());
    }
    write_sequence(out_dir / "frames", out);
    return {{"frames", out_rel + "/frames"}};
  }

  if (req.stage == kPoseEstimate) {
    const MaskSequence masks = read_mask_sequence(ws.resolve(artifact(req, "masks")));
    PoseSequence poses = stub_pose(masks);
    if (fault == Fault::kWrongLength) {
      poses.frames.push_back(poses.frames.back());
    } else if (fault == Fault::kOutOfBand) {
      poses.frames.front()[kNose] = {-50.0, -50.0, 1.0};
    }
    write_text(out_dir / "poses.json", pose_sequence_to_json(poses));
    return {{"poses", out_rel + "/poses.json"}};
  }

  if (req.stage == kAnimate) {
    ReferenceCharacter ref{read_png(ws.resolve(artifact(req, "reference"))),
                           std::nullopt};
    if (params.contains("anchor") && !params["anchor"].is_null()) {
      ref.anchor = keypoint_set_from_json(params["anchor"]);
    }
    const PoseSequence poses =
        pose_sequence_from_json(read_text(ws.resolve(artifact(req, "poses"))));
    const int width = params.value("width", poses.width);
    const int height = params.value("height", poses.height);
    FrameSequence out = stub_animate(ref, poses, width, height);
    if (fault == Fault::kWrongLength) {
      out = with_extra_frame(out);
    } else if (fault == Fault::kOutOfBand) {
      out = widened(out);
    }
    write_sequence(out_dir / "frames", out);
    return {{"frames", out_rel + "/frames"}};
  }

  // harmonize_params
  const FrameSequence composite = ingest_frames(ws.resolve(artifact(req, "frames")));
  const MaskSequence masks = read_mask_sequence(ws.resolve(artifact(req, "masks")));
  const BlockRange range{params.value("start", std::size_t{0}),
                         params.value("end", composite.size())};
  const int stride = params.value("stride", ColorTransformGrid::kDefaultStride);
  if (stride < 1) throw ParamError("grid stride must be positive");
  HarmonizeResult result;
  if (identity) {
    result.grids.push_back(
        ColorTransformGrid::covering(composite.width(), composite.height(), stride));
  } else {
    const int ring_width = params.value("ring_width", kDefaultRingWidth);
    result.grids.push_back(
        stub_harmonize_params(composite, masks, range, ring_width, stride));
  }
  if (fault == Fault::kWrongLength) {
    result.per_frame = true;
    result.grids.assign(range.size() + 1, result.grids.front());
  } else if (fault == Fault::kOutOfBand) {
    result.grids = {ColorTransformGrid(1, 1, 1, AffineColor::identity())};
  } else if (fault == Fault::kBadGrid) {
    result.grids.front().cell(0, 0).at(0, 0) =
        std::numeric_limits<double>::quiet_NaN();
  }
  write_text(out_dir / "grids.json", harmonize_result_to_json(result));
  return {{"grids", out_rel + "/grids.json"}};
}

}  // namespace recast
