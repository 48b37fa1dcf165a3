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


#ifndef RECAST_PROMPT_H_
#define RECAST_PROMPT_H_

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "recast/mask.h"

namespace recast {

enum class PromptKind { kPoint, kBox, kMask };

struct PromptPoint {
  int x = 0;
  int y = 0;
  bool positive = true;
  bool operator==(const PromptPoint&) const = default;
};

// User hint locating the subject on one frame: clicked points, a box, or a
// mask.
struct Prompt {
  std::size_t frame_index = 0;
  PromptKind kind = PromptKind::kPoint;
  std::vector<PromptPoint> points;
  std::optional<BBox> box;
  std::optional<RleMask> mask;

  // Throws PromptError when the prompt is inconsistent or falls outside a
  // `n_frames`-long clip of `width` x `height` frames.
  void validate(int width, int height, std::size_t n_frames) const;

  // Seed pixel: first positive point, box centre, or mask centroid (rounded
  // half up). Throws PromptError when there is none.
  std::pair<int, int> seed() const;

  bool operator==(const Prompt&) const = default;
};

}  // namespace recast

#endif  // RECAST_PROMPT_H_
