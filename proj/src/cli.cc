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


#include "recast/cli.h"

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "recast/composite.h"
#include "recast/error.h"
#include "recast/pipeline.h"
#include "recast/png_io.h"
#include "recast/service.h"
#include "recast/worker.h"

namespace recast {

namespace fs = std::filesystem;

namespace {

int exit_code_for(const Error& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const PromptError*>(&e) ||
      dynamic_cast<const ParamError*>(&e) || dynamic_cast<const NotFoundError*>(&e) ||
      dynamic_cast<const GapError*>(&e) || dynamic_cast<const EmptyError*>(&e) ||
      dynamic_cast<const DecoderError*>(&e)) {
    return kExitConfig;
  }
  if (dynamic_cast<const StageError*>(&e) ||
      dynamic_cast<const ContractViolationError*>(&e) ||
      dynamic_cast<const ProtocolError*>(&e) || dynamic_cast<const TimeoutError*>(&e) ||
      dynamic_cast<const UninpaintableError*>(&e) ||
      dynamic_cast<const DegeneratePoseError*>(&e)) {
    return kExitStage;
  }
  return kExitFailure;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

Json parse_json_file(const fs::path& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw ConfigError("'" + path.string() + "' is not JSON: " + e.what());
  }
}

// `--worker` accepts a builtin name, inline JSON or a path to a JSON file.
WorkerSpec parse_worker(const std::string& text) {
  if (text.empty()) return WorkerSpec{};
  if (text.front() == '{') {
    try {
      return worker_spec_from_json(Json::parse(text));
    } catch (const Json::exception& e) {
      throw ConfigError(std::string("--worker is not JSON: ") + e.what());
    }
  }
  if (fs::exists(text)) return worker_spec_from_json(parse_json_file(text));
  return worker_spec_from_json(Json(text));
}

fs::path mask_file(const Workspace& ws, const std::string& id) {
  if (!ArtifactId::is_valid_hex(id)) throw ConfigError("invalid mask id '" + id + "'");
  const fs::path path = ws.root() / "masks" / (id + ".json");
  if (!fs::exists(path)) throw NotFoundError("unknown mask id '" + id + "'");
  return path;
}

void store_masks(const Workspace& ws, const MaskSequence& masks) {
  const fs::path path = ws.root() / "masks" / (masks.id().hex() + ".json");
  if (fs::exists(path)) return;
  const fs::path tmp = path.string() + ".tmp";
  write_mask_sequence(tmp, masks);
  fs::rename(tmp, path);
}

struct Args {
  std::string workspace;
  std::string name;
  std::string frames_dir;
  std::string video;
  std::string decoder;
  std::string fps = "24";
  std::string sequence;
  std::string prompt;
  std::string masks;
  std::string output;
  std::string reference;
  std::string foreground;
  std::string background;
  std::string worker;
  std::string config;
  std::string crash_after;
  std::string host = "127.0.0.1";
  std::string static_dir;
  double tau = 30.0;
  int iters = 200;
  int port = 8080;
};

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err) {
  CLI::App app{"recast: character replacement pipeline engine", "recast"};
  app.require_subcommand(1);
  Args a;
  std::string stage = "";

  auto workspace_opt = [&](CLI::App* sub) {
    sub->add_option("--workspace,-w", a.workspace, "Workspace directory")->required();
  };
  auto worker_opt = [&](CLI::App* sub) {
    sub->add_option("--worker", a.worker,
                    "Worker: builtin name, inline JSON or JSON file (default: stub)");
  };

  auto* ingest = app.add_subcommand("ingest", "Import a frame directory or video");
  workspace_opt(ingest);
  ingest->add_option("--name", a.name, "Sequence name")->required();
  auto* frames_opt = ingest->add_option("--frames", a.frames_dir, "Directory of frame_%06d.png");
  auto* video_opt = ingest->add_option("--video", a.video, "Video file to decode");
  ingest->add_option("--decoder", a.decoder,
                     "Decoder command template with {in} and {out}")
      ->needs(video_opt);
  frames_opt->excludes(video_opt);
  ingest->add_option("--fps", a.fps, "Frame rate, e.g. 24 or 30000/1001");

  auto* segment = app.add_subcommand("segment", "Segment and track from a prompt");
  workspace_opt(segment);
  segment->add_option("--sequence", a.sequence, "Scene sequence")->required();
  segment->add_option("--prompt", a.prompt, "Prompt JSON file")->required();
  segment->add_option("--tau", a.tau, "Colour distance threshold");
  worker_opt(segment);

  auto* remove = app.add_subcommand("remove", "Inpaint the tracked subject out");
  workspace_opt(remove);
  remove->add_option("--sequence", a.sequence, "Scene sequence")->required();
  remove->add_option("--masks", a.masks, "Mask id from `segment`")->required();
  remove->add_option("--output", a.output, "Output sequence name")->required();
  remove->add_option("--iters", a.iters, "Inpaint iterations");
  worker_opt(remove);

  auto* animate = app.add_subcommand("animate", "Animate a reference character");
  workspace_opt(animate);
  animate->add_option("--sequence", a.sequence, "Driving scene sequence")->required();
  animate->add_option("--masks", a.masks, "Mask id from `segment`")->required();
  animate->add_option("--reference", a.reference, "RGBA reference PNG")->required();
  animate->add_option("--output", a.output, "Output sequence name")->required();
  worker_opt(animate);

  auto* compose = app.add_subcommand("compose", "Composite an RGBA sequence over a scene");
  workspace_opt(compose);
  compose->add_option("--foreground", a.foreground, "RGBA sequence")->required();
  compose->add_option("--background", a.background, "RGB sequence")->required();
  compose->add_option("--output", a.output, "Output sequence name")->required();

  auto* run_cmd = app.add_subcommand("run", "Run the full pipeline from a config");
  workspace_opt(run_cmd);
  run_cmd->add_option("--config,-c", a.config, "PipelineConfig JSON")->required();
  run_cmd->add_option("--crash-after", a.crash_after)->group("");

  auto* verify = app.add_subcommand("verify-cache", "Re-execute cached stages and compare");
  workspace_opt(verify);
  verify->add_option("--config,-c", a.config, "PipelineConfig JSON")->required();

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  workspace_opt(serve);
  serve->add_option("--host", a.host, "Bind address");
  serve->add_option("--port", a.port, "Port (0 picks a free one)");
  serve->add_option("--static", a.static_dir, "Directory served at /");
  serve->add_option("--tau", a.tau, "Default colour threshold for prompts");
  worker_opt(serve);

  std::vector<const char*> argv = {"recast"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    if (a.workspace.empty()) throw ConfigError("--workspace is required");
    Workspace ws = Workspace::open(a.workspace);

    if (*ingest) {
      stage = "ingest";
      FrameSequence seq = [&] {
        const Rational fps = Rational::parse(a.fps);
        if (!a.video.empty()) {
          if (a.decoder.empty()) throw ConfigError("--video needs --decoder");
          const fs::path tmp = ws.root() / "work" / ("decode-" + a.name);
          fs::remove_all(tmp);
          fs::create_directories(tmp);
          decode_video(a.decoder, a.video, tmp);
          FrameSequence decoded = ws.ingest(a.name, tmp, fps);
          fs::remove_all(tmp);
          return decoded;
        }
        if (a.frames_dir.empty()) throw ConfigError("ingest needs --frames or --video");
        return ws.ingest(a.name, a.frames_dir, fps);
      }();
      out << seq.id().hex() << "\n";
      return kExitOk;
    }

    if (*segment) {
      stage = std::string(kSegmentTrack);
      const Prompt prompt = prompt_from_json(parse_json_file(a.prompt));
      WorkerClient worker(parse_worker(a.worker), ws);
      const MaskSequence masks =
          call_segment_track(worker, ws.load_sequence(a.sequence), prompt, a.tau);
      store_masks(ws, masks);
      out << masks.id().hex() << "\n";
      return kExitOk;
    }

    if (*remove) {
      stage = std::string(kInpaint);
      const MaskSequence masks = read_mask_sequence(mask_file(ws, a.masks));
      WorkerClient worker(parse_worker(a.worker), ws);
      const FrameSequence result =
          call_inpaint(worker, ws.load_sequence(a.sequence), masks, a.iters);
      ws.store_sequence(a.output, result);
      out << result.id().hex() << "\n";
      return kExitOk;
    }

    if (*animate) {
      const MaskSequence masks = read_mask_sequence(mask_file(ws, a.masks));
      const FrameSequence scene = ws.load_sequence(a.sequence);
      WorkerClient worker(parse_worker(a.worker), ws);
      stage = std::string(kPoseEstimate);
      const PoseSequence poses = call_pose_estimate(worker, scene, masks);
      stage = std::string(kAnimate);
      const fs::path ref_path = fs::path(a.reference).is_absolute()
                                    ? fs::path(a.reference)
                                    : ws.root() / a.reference;
      if (!fs::exists(ref_path)) throw ConfigError("reference '" + a.reference + "' not found");
      const ReferenceCharacter ref{read_png(ref_path), std::nullopt};
      const FrameSequence frames =
          call_animate(worker, ref, poses, scene.width(), scene.height());
      ws.store_sequence(a.output, FrameSequence(frames.frames(), scene.fps()));
      out << frames.id().hex() << "\n";
      return kExitOk;
    }

    if (*compose) {
      stage = "composite";
      const FrameSequence bg = ws.load_sequence(a.background);
      const FrameSequence composite =
          composite_sequence(ws.load_sequence(a.foreground), bg);
      ws.store_sequence(a.output, FrameSequence(composite.frames(), bg.fps()));
      out << composite.id().hex() << "\n";
      return kExitOk;
    }

    if (*run_cmd || *verify) {
      const PipelineConfig config = load_config(a.config);
      const StagePlan stage_plan = plan(config, ws);
      RunOptions opts;
      opts.verify_cache = verify->parsed();
      if (!a.crash_after.empty()) {
        const std::string crash_after = a.crash_after;
        opts.on_node_done = [crash_after](const std::string& node, bool) {
          if (node == crash_after) std::_Exit(137);
        };
      }
      RunReport report;
      try {
        run(stage_plan, ws, opts, &report);
      } catch (const Error& e) {
        stage = report.failed_node;
        throw;
      }
      if (*verify) {
        if (!report.verify_mismatches.empty()) {
          for (const auto& node : report.verify_mismatches) {
            err << "cache mismatch: " << node << "\n";
          }
          return kExitFailure;
        }
        out << "cache verified: " << report.cache_hits.size() << " hits, "
            << report.executed.size() << " executed\n";
      }
      out << report.final_id.hex() << "\n";
      return kExitOk;
    }

    if (*serve) {
      ServiceOptions opts;
      opts.segment_worker = parse_worker(a.worker);
      opts.default_tau = a.tau;
      opts.static_dir = a.static_dir;
      Service service(ws, opts);
      const int port = service.bind(a.host, a.port);
      out << "listening on http://" << a.host << ":" << port << std::endl;
      service.serve();
      return kExitOk;
    }
  } catch (const Error& e) {
    const int code = exit_code_for(e);
    if (code == kExitStage && !stage.empty()) {
      err << "error: stage '" << stage << "' failed: " << e.kind() << ": " << e.what()
          << "\n";
    } else {
      err << "error: " << e.kind() << ": " << e.what() << "\n";
    }
    return code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  err << app.help();
  return kExitConfig;
}

}  // namespace recast
