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


#ifndef RECAST_PROTOCOL_H_
#define RECAST_PROTOCOL_H_

// Wire format shared by the engine and its workers. Every message is a
// single-line JSON object; pixel data travels as workspace-relative paths.

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "recast/harmonize.h"
#include "recast/pose.h"
#include "recast/prompt.h"

namespace recast {

using Json = nlohmann::json;

inline constexpr int kProtocolVersion = 1;

inline constexpr std::string_view kSegmentTrack = "segment_track";
inline constexpr std::string_view kInpaint = "inpaint";
inline constexpr std::string_view kPoseEstimate = "pose_estimate";
inline constexpr std::string_view kAnimate = "animate";
inline constexpr std::string_view kHarmonizeParams = "harmonize_params";
// Diagnostic stage: the worker answers with the request's own artifacts.
inline constexpr std::string_view kEcho = "echo";

inline constexpr std::array<std::string_view, 5> kStageNames = {
    kSegmentTrack, kInpaint, kPoseEstimate, kAnimate, kHarmonizeParams};

// True for the five stage names and the echo stage.
bool is_known_stage(std::string_view name);

enum class Transport { kSubprocess, kHttp, kBuiltin };

// How to reach one worker. Builtin workers run the stubs in-process and
// exist for tests and offline use.
struct WorkerSpec {
  Transport transport = Transport::kBuiltin;
  std::vector<std::string> command;  // kSubprocess
  std::string url;                   // kHttp, e.g. "http://127.0.0.1:8071"
  std::string builtin = "stub";      // kBuiltin: "stub" or "identity"
  double timeout_seconds = 600.0;
  // Upper bound on frames per request; 0 defers to the worker's handshake.
  int max_batch = 0;

  // ConfigError on a non-positive timeout, negative max_batch, empty command
  // or url, or an unknown builtin.
  void validate() const;
  bool operator==(const WorkerSpec&) const = default;
};

Json worker_spec_to_json(const WorkerSpec& spec);
// Accepts an object or a bare string naming a builtin worker.
WorkerSpec worker_spec_from_json(const Json& j);
// Canonical description used in cache keys; omits the timeout, which cannot
// change results.
Json worker_identity(const WorkerSpec& spec);

struct StageRequest {
  std::string request_id;
  std::string stage;
  Json params = Json::object();
  std::map<std::string, std::string> artifacts;
};

struct StageResponse {
  std::string request_id;
  bool ok = false;
  std::map<std::string, std::string> artifacts;
  std::string error_code;
  std::string error_message;
};

struct ReadyMessage {
  int protocol_version = kProtocolVersion;
  std::vector<std::string> stages;
  int max_batch = 0;
};

// Parses one line. ProtocolError unless it is a JSON object.
Json parse_message(const std::string& line);

Json hello_message(const std::string& workspace);
Json shutdown_message();
Json ready_to_json(const ReadyMessage& ready);
// ProtocolError for a missing "ready" key, a protocol version other than 1,
// an unknown stage name, or a negative max_batch.
ReadyMessage ready_from_json(const Json& j);

Json request_to_json(const StageRequest& req);
StageRequest request_from_json(const Json& j);
Json response_to_json(const StageResponse& resp);
// ProtocolError unless the message carries exactly one of ok+artifacts and
// error{code,message}.
StageResponse response_from_json(const Json& j);

// Prompt wire format:
//   {"frame_index":0,"kind":"point","points":[{"x":1,"y":2,"label":"positive"}],
//    "box":{"x_min":..,"y_min":..,"x_max":..,"y_max":..},
//    "mask":{"dims":[w,h],"counts":[...]}}
Json prompt_to_json(const Prompt& prompt);
// PromptError on malformed input.
Prompt prompt_from_json(const Json& j);

Json keypoint_set_to_json(const KeypointSet& set);
KeypointSet keypoint_set_from_json(const Json& j);

// {"dims":[w,h],"frames":[[{"name":"nose","x":..,"y":..,"confidence":..},...]]}
std::string pose_sequence_to_json(const PoseSequence& poses);
// ProtocolError on malformed input; keypoints are matched by name.
PoseSequence pose_sequence_from_json(const std::string& text);

// Per-block harmonization result: one grid for the whole block, or one grid
// per frame of the block.
struct HarmonizeResult {
  bool per_frame = false;
  std::vector<ColorTransformGrid> grids;
};

std::string harmonize_result_to_json(const HarmonizeResult& result);
HarmonizeResult harmonize_result_from_json(const std::string& text);

}  // namespace recast

#endif  // RECAST_PROTOCOL_H_
