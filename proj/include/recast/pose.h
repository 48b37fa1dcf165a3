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


#ifndef RECAST_POSE_H_
#define RECAST_POSE_H_

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "recast/frame.h"

namespace recast {

inline constexpr std::size_t kNumKeypoints = 17;

// COCO ordering.
inline constexpr std::array<std::string_view, kNumKeypoints> kKeypointNames = {
    "nose",           "left_eye",       "right_eye",  "left_ear",
    "right_ear",      "left_shoulder",  "right_shoulder", "left_elbow",
    "right_elbow",    "left_wrist",     "right_wrist",    "left_hip",
    "right_hip",      "left_knee",      "right_knee",     "left_ankle",
    "right_ankle"};

enum Joint : std::size_t {
  kNose = 0,
  kLeftEye,
  kRightEye,
  kLeftEar,
  kRightEar,
  kLeftShoulder,
  kRightShoulder,
  kLeftElbow,
  kRightElbow,
  kLeftWrist,
  kRightWrist,
  kLeftHip,
  kRightHip,
  kLeftKnee,
  kRightKnee,
  kLeftAnkle,
  kRightAnkle,
};

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double confidence = 0.0;
  bool operator==(const Keypoint&) const = default;
};

using KeypointSet = std::array<Keypoint, kNumKeypoints>;

// True when every keypoint has zero confidence.
bool is_absent(const KeypointSet& set);

struct PoseSequence {
  int width = 0;
  int height = 0;
  std::vector<KeypointSet> frames;

  // Throws ParamError on confidence outside [0, 1], or on confident
  // keypoints lying outside the frame.
  void validate() const;
  bool operator==(const PoseSequence&) const = default;
};

// The replacement character: an RGBA image whose alpha is the matte, with
// optional explicit anchors. Without anchors they are derived from the
// matte's bounding box.
struct ReferenceCharacter {
  Frame image;
  std::optional<KeypointSet> anchor;
};

}  // namespace recast

#endif  // RECAST_POSE_H_
