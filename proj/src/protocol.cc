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


#include "recast/protocol.h"

#include <algorithm>
#include <cmath>

#include "recast/error.h"
#include "recast/stubs.h"

namespace recast {

namespace {

template <typename E>
[[noreturn]] void rethrow_json(const char* what, const Json::exception& e) {
  throw E(std::string(what) + ": " + e.what());
}

std::map<std::string, std::string> artifacts_from_json(const Json& j) {
  if (!j.is_object()) throw ProtocolError("artifacts must be an object");
  std::map<std::string, std::string> out;
  for (const auto& [name, path] : j.items()) {
    if (!path.is_string()) {
      throw ProtocolError("artifact '" + name + "' must be a path string");
    }
    out.emplace(name, path.get<std::string>());
  }
  return out;
}

bool inside(int x, int y, int width, int height) {
  return x >= 0 && y >= 0 && x < width && y < height;
}

}  // namespace

bool is_known_stage(std::string_view name) {
  return name == kEcho || std::find(kStageNames.begin(), kStageNames.end(),
                                    name) != kStageNames.end();
}

void WorkerSpec::validate() const {
  if (!(timeout_seconds > 0.0) || !std::isfinite(timeout_seconds)) {
    throw ConfigError("worker timeout must be a positive number of seconds");
  }
  if (max_batch < 0) throw ConfigError("worker max_batch must be non-negative");
  switch (transport) {
    case Transport::kSubprocess:
      if (command.empty()) throw ConfigError("subprocess worker needs a command");
      break;
    case Transport::kHttp:
      if (url.empty()) throw ConfigError("http worker needs a url");
      break;
    case Transport::kBuiltin:
      if (builtin != "stub" && builtin != "identity") {
        throw ConfigError("unknown builtin worker '" + builtin + "'");
      }
      break;
  }
}

Json worker_spec_to_json(const WorkerSpec& spec) {
  Json j = worker_identity(spec);
  j["timeout"] = spec.timeout_seconds;
  return j;
}

Json worker_identity(const WorkerSpec& spec) {
  Json j = Json::object();
  switch (spec.transport) {
    case Transport::kSubprocess:
      j["transport"] = "subprocess-stdio";
      j["command"] = spec.command;
      break;
    case Transport::kHttp:
      j["transport"] = "http";
      j["url"] = spec.url;
      break;
    case Transport::kBuiltin:
      j["transport"] = "builtin";
      j["name"] = spec.builtin;
      break;
  }
  j["max_batch"] = spec.max_batch;
  return j;
}

WorkerSpec worker_spec_from_json(const Json& j) {
  WorkerSpec spec;
  try {
    if (j.is_string()) {
      spec.builtin = j.get<std::string>();
    } else {
      const std::string transport = j.at("transport").get<std::string>();
      if (transport == "subprocess-stdio") {
        spec.transport = Transport::kSubprocess;
        spec.command = j.at("command").get<std::vector<std::string>>();
      } else if (transport == "http") {
        spec.transport = Transport::kHttp;
        spec.url = j.at("url").get<std::string>();
      } else if (transport == "builtin") {
        spec.builtin = j.value("name", std::string("stub"));
      } else {
        throw ConfigError("unknown worker transport '" + transport + "'");
      }
      spec.timeout_seconds = j.value("timeout", spec.timeout_seconds);
      spec.max_batch = j.value("max_batch", spec.max_batch);
    }
  } catch (const Json::exception& e) {
    rethrow_json<ConfigError>("malformed worker spec", e);
  }
  spec.validate();
  return spec;
}

Json parse_message(const std::string& line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::exception& e) {
    rethrow_json<ProtocolError>("worker message is not JSON", e);
  }
  if (!j.is_object()) throw ProtocolError("worker message must be a JSON object");
  return j;
}

Json hello_message(const std::string& workspace) {
  return {{"hello", {{"protocol_version", kProtocolVersion},
                     {"workspace", workspace}}}};
}

Json shutdown_message() { return {{"shutdown", Json::object()}}; }

Json ready_to_json(const ReadyMessage& ready) {
  return {{"ready", {{"protocol_version", ready.protocol_version},
                     {"stages", ready.stages},
                     {"max_batch", ready.max_batch}}}};
}

ReadyMessage ready_from_json(const Json& j) {
  ReadyMessage ready;
  try {
    const Json& body = j.at("ready");
    ready.protocol_version = body.at("protocol_version").get<int>();
    ready.stages = body.at("stages").get<std::vector<std::string>>();
    ready.max_batch = body.value("max_batch", 0);
  } catch (const Json::exception& e) {
    rethrow_json<ProtocolError>("malformed ready message", e);
  }
  if (ready.protocol_version != kProtocolVersion) {
    throw ProtocolError("unsupported protocol version " +
                        std::to_string(ready.protocol_version) +
                        " (engine speaks " + std::to_string(kProtocolVersion) +
                        ")");
  }
  for (const auto& stage : ready.stages) {
    if (!is_known_stage(stage)) {
      throw ProtocolError("worker advertises unknown stage '" + stage + "'");
    }
  }
  if (ready.max_batch < 0) throw ProtocolError("negative max_batch in handshake");
  return ready;
}

Json request_to_json(const StageRequest& req) {
  return {{"protocol_version", kProtocolVersion},
          {"request_id", req.request_id},
          {"stage", req.stage},
          {"params", req.params},
          {"artifacts", req.artifacts}};
}

StageRequest request_from_json(const Json& j) {
  StageRequest req;
  try {
    if (j.at("protocol_version").get<int>() != kProtocolVersion) {
      throw ProtocolError("unsupported protocol version in request");
    }
    req.request_id = j.at("request_id").get<std::string>();
    req.stage = j.at("stage").get<std::string>();
    req.params = j.value("params", Json::object());
    if (!req.params.is_object()) throw ProtocolError("params must be an object");
    req.artifacts = artifacts_from_json(j.value("artifacts", Json::object()));
  } catch (const Json::exception& e) {
    rethrow_json<ProtocolError>("malformed request", e);
  }
  return req;
}

Json response_to_json(const StageResponse& resp) {
  Json j = {{"protocol_version", kProtocolVersion},
            {"request_id", resp.request_id}};
  if (resp.ok) {
    j["ok"] = true;
    j["artifacts"] = resp.artifacts;
  } else {
    j["ok"] = false;
    j["error"] = {{"code", resp.error_code}, {"message", resp.error_message}};
  }
  return j;
}

StageResponse response_from_json(const Json& j) {
  StageResponse resp;
  try {
    if (j.at("protocol_version").get<int>() != kProtocolVersion) {
      throw ProtocolError("unsupported protocol version in response");
    }
    resp.request_id = j.at("request_id").get<std::string>();
    const bool has_artifacts = j.contains("artifacts");
    const bool has_error = j.contains("error");
    resp.ok = j.at("ok").get<bool>();
    if (resp.ok) {
      if (!has_artifacts || has_error) {
        throw ProtocolError("ok response must carry artifacts and no error");
      }
      resp.artifacts = artifacts_from_json(j.at("artifacts"));
    } else {
      if (!has_error || has_artifacts) {
        throw ProtocolError("error response must carry an error and no artifacts");
      }
      resp.error_code = j.at("error").at("code").get<std::string>();
      resp.error_message = j.at("error").at("message").get<std::string>();
    }
  } catch (const Json::exception& e) {
    rethrow_json<ProtocolError>("malformed response", e);
  }
  return resp;
}

// ---------------------------------------------------------------------------
// Prompt

void Prompt::validate(int width, int height, std::size_t n_frames) const {
  if (frame_index >= n_frames) {
    throw PromptError("prompt frame " + std::to_string(frame_index) +
                      " is beyond the " + std::to_string(n_frames) +
                      "-frame clip");
  }
  for (const auto& p : points) {
    if (!inside(p.x, p.y, width, height)) {
      throw PromptError("prompt point (" + std::to_string(p.x) + ", " +
                        std::to_string(p.y) + ") lies outside the " +
                        std::to_string(width) + "x" + std::to_string(height) +
                        " frame");
    }
  }
  switch (kind) {
    case PromptKind::kPoint:
      if (points.empty()) throw PromptError("point prompt needs at least one point");
      if (std::none_of(points.begin(), points.end(),
                       [](const PromptPoint& p) { return p.positive; })) {
        throw PromptError("point prompt needs a positive point");
      }
      break;
    case PromptKind::kBox:
      if (!box) throw PromptError("box prompt without a box");
      if (box->x_min > box->x_max || box->y_min > box->y_max) {
        throw PromptError("box corners are out of order");
      }
      if (!inside(box->x_min, box->y_min, width, height) ||
          !inside(box->x_max, box->y_max, width, height)) {
        throw PromptError("box lies outside the frame");
      }
      break;
    case PromptKind::kMask: {
      if (!mask) throw PromptError("mask prompt without a mask");
      if (mask->width != width || mask->height != height) {
        throw PromptError("prompt mask size does not match the frames");
      }
      Mask decoded;
      try {
        decoded = rle_decode(*mask);
      } catch (const CorruptRleError& e) {
        throw PromptError(std::string("prompt mask: ") + e.what());
      }
      if (decoded.empty()) throw PromptError("prompt mask is empty");
      break;
    }
  }
}

std::pair<int, int> Prompt::seed() const {
  switch (kind) {
    case PromptKind::kPoint:
      for (const auto& p : points) {
        if (p.positive) return {p.x, p.y};
      }
      throw PromptError("point prompt has no positive point");
    case PromptKind::kBox:
      if (!box) throw PromptError("box prompt without a box");
      return {static_cast<int>(std::floor((box->x_min + box->x_max) / 2.0 + 0.5)),
              static_cast<int>(std::floor((box->y_min + box->y_max) / 2.0 + 0.5))};
    case PromptKind::kMask: {
      if (!mask) throw PromptError("mask prompt without a mask");
      const auto c = mask_centroid(rle_decode(*mask));
      if (!c) throw PromptError("prompt mask is empty");
      return *c;
    }
  }
  throw PromptError("unknown prompt kind");
}

Json prompt_to_json(const Prompt& prompt) {
  static constexpr const char* kKinds[] = {"point", "box", "mask"};
  Json j = {{"frame_index", prompt.frame_index},
            {"kind", kKinds[static_cast<int>(prompt.kind)]}};
  Json points = Json::array();
  for (const auto& p : prompt.points) {
    points.push_back({{"x", p.x},
                      {"y", p.y},
                      {"label", p.positive ? "positive" : "negative"}});
  }
  j["points"] = points;
  if (prompt.box) {
    j["box"] = {{"x_min", prompt.box->x_min},
                {"y_min", prompt.box->y_min},
                {"x_max", prompt.box->x_max},
                {"y_max", prompt.box->y_max}};
  }
  if (prompt.mask) {
    j["mask"] = {{"dims", {prompt.mask->width, prompt.mask->height}},
                 {"counts", prompt.mask->counts}};
  }
  return j;
}

Prompt prompt_from_json(const Json& j) {
  Prompt prompt;
  try {
    if (!j.is_object()) throw PromptError("prompt must be a JSON object");
    const auto index = j.value("frame_index", 0LL);
    if (index < 0) throw PromptError("prompt frame_index must be non-negative");
    prompt.frame_index = static_cast<std::size_t>(index);
    const std::string kind = j.value("kind", std::string("point"));
    if (kind == "point") {
      prompt.kind = PromptKind::kPoint;
    } else if (kind == "box") {
      prompt.kind = PromptKind::kBox;
    } else if (kind == "mask") {
      prompt.kind = PromptKind::kMask;
    } else {
      throw PromptError("unknown prompt kind '" + kind + "'");
    }
    for (const auto& p : j.value("points", Json::array())) {
      const std::string label = p.value("label", std::string("positive"));
      if (label != "positive" && label != "negative") {
        throw PromptError("point label must be positive or negative");
      }
      prompt.points.push_back(
          {p.at("x").get<int>(), p.at("y").get<int>(), label == "positive"});
    }
    if (j.contains("box") && !j.at("box").is_null()) {
      const Json& b = j.at("box");
      prompt.box = BBox{b.at("x_min").get<int>(), b.at("y_min").get<int>(),
                        b.at("x_max").get<int>(), b.at("y_max").get<int>()};
    }
    if (j.contains("mask") && !j.at("mask").is_null()) {
      const Json& m = j.at("mask");
      const Json& dims = m.at("dims");
      prompt.mask = RleMask{dims.at(0).get<int>(), dims.at(1).get<int>(),
                            m.at("counts").get<std::vector<std::uint32_t>>()};
    }
  } catch (const Json::exception& e) {
    rethrow_json<PromptError>("malformed prompt", e);
  }
  return prompt;
}

// ---------------------------------------------------------------------------
// Poses

bool is_absent(const KeypointSet& set) {
  return std::all_of(set.begin(), set.end(),
                     [](const Keypoint& k) { return k.confidence == 0.0; });
}

void PoseSequence::validate() const {
  if (width < 1 || height < 1) throw ParamError("pose dims must be positive");
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (std::size_t k = 0; k < kNumKeypoints; ++k) {
      const Keypoint& p = frames[f][k];
      if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) {
        throw ParamError("keypoint confidence outside [0, 1]");
      }
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw ParamError("non-finite keypoint coordinate");
      }
      if (p.confidence > 0.0 &&
          (p.x < 0.0 || p.y < 0.0 || p.x >= width || p.y >= height)) {
        throw ParamError("confident keypoint " + std::string(kKeypointNames[k]) +
                         " of frame " + std::to_string(f) +
                         " lies outside the frame");
      }
    }
  }
}

Json keypoint_set_to_json(const KeypointSet& set) {
  Json out = Json::array();
  for (std::size_t k = 0; k < kNumKeypoints; ++k) {
    out.push_back({{"name", kKeypointNames[k]},
                   {"x", set[k].x},
                   {"y", set[k].y},
                   {"confidence", set[k].confidence}});
  }
  return out;
}

KeypointSet keypoint_set_from_json(const Json& j) {
  KeypointSet set{};
  std::array<bool, kNumKeypoints> seen{};
  try {
    if (!j.is_array()) throw ProtocolError("keypoint set must be an array");
    for (const auto& item : j) {
      const std::string name = item.at("name").get<std::string>();
      const auto it = std::find(kKeypointNames.begin(), kKeypointNames.end(), name);
      if (it == kKeypointNames.end()) {
        throw ProtocolError("unknown keypoint '" + name + "'");
      }
      const auto k = static_cast<std::size_t>(it - kKeypointNames.begin());
      if (seen[k]) throw ProtocolError("duplicate keypoint '" + name + "'");
      seen[k] = true;
      set[k] = {item.at("x").get<double>(), item.at("y").get<double>(),
                item.at("confidence").get<double>()};
    }
  } catch (const Json::exception& e) {
    rethrow_json<ProtocolError>("malformed keypoint set", e);
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
    throw ProtocolError("keypoint set must name all 17 joints");
  }
  return set;
}

std::string pose_sequence_to_json(const PoseSequence& poses) {
  Json frames = Json::array();
  for (const auto& set : poses.frames) frames.push_back(keypoint_set_to_json(set));
  return Json{{"dims", {poses.width, poses.height}}, {"frames", frames}}.dump();
}

PoseSequence pose_sequence_from_json(const std::string& text) {
  PoseSequence poses;
  try {
    const Json doc = Json::parse(text);
    const Json& dims = doc.at("dims");
    poses.width = dims.at(0).get<int>();
    poses.height = dims.at(1).get<int>();
    for (const auto& set : doc.at("frames")) {
      poses.frames.push_back(keypoint_set_from_json(set));
    }
  } catch (const Json::exception& e) {
    rethrow_json<ProtocolError>("malformed pose sequence", e);
  }
  return poses;
}

std::string harmonize_result_to_json(const HarmonizeResult& result) {
  Json grids = Json::array();
  for (const auto& g : result.grids) grids.push_back(Json::parse(grid_to_json(g)));
  return Json{{"granularity", result.per_frame ? "frame" : "block"},
              {"grids", grids}}
      .dump();
}

HarmonizeResult harmonize_result_from_json(const std::string& text) {
  HarmonizeResult result;
  try {
    const Json doc = Json::parse(text);
    const std::string granularity = doc.at("granularity").get<std::string>();
    if (granularity != "block" && granularity != "frame") {
      throw ProtocolError("granularity must be 'block' or 'frame'");
    }
    result.per_frame = granularity == "frame";
    for (const auto& g : doc.at("grids")) {
      result.grids.push_back(grid_from_json(g.dump()));
    }
  } catch (const Json::exception& e) {
    rethrow_json<ProtocolError>("malformed harmonize result", e);
  }
  return result;
}

}  // namespace recast
