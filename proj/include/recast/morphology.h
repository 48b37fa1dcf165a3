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


#ifndef RECAST_MORPHOLOGY_H_
#define RECAST_MORPHOLOGY_H_

#include <utility>
#include <vector>

#include "recast/mask.h"

namespace recast {

// Euclidean disk: every (dx, dy) with dx^2 + dy^2 <= radius^2.
class DiskElement {
 public:
  // Throws ParamError for negative radius.
  explicit DiskElement(int radius);

  int radius() const { return radius_; }
  const std::vector<std::pair<int, int>>& offsets() const { return offsets_; }
  // Largest |dx| allowed in row dy, for |dy| <= radius.
  int half_width(int dy) const { return half_widths_[dy + radius_]; }

 private:
  int radius_;
  std::vector<int> half_widths_;
  std::vector<std::pair<int, int>> offsets_;
};

// Pixels outside the image count as unset for both operations, so erosion
// shrinks masks touching the border.
Mask dilate(const Mask& mask, int radius);
Mask erode(const Mask& mask, int radius);

// dilate(mask, r_out) & ~erode(mask, r_in): a band straddling the contour.
Mask edge_band(const Mask& mask, int r_out, int r_in);

}  // namespace recast

#endif  // RECAST_MORPHOLOGY_H_
