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


#ifndef RECAST_EDGE_REFINE_H_
#define RECAST_EDGE_REFINE_H_

#include <functional>
#include <utility>

#include "recast/frame.h"
#include "recast/mask.h"

namespace recast {

// Band radii are given at `scale_reference_width` and scaled linearly with
// the frame width.
struct EdgeBandConfig {
  int r_out = 6;
  int r_in = 2;
  int scale_reference_width = 1024;

  // ConfigError unless r_out >= 1, r_in >= 0, reference width >= 1.
  void validate() const;
};

// {r_out, r_in} for a frame `frame_width` pixels wide. Rounded to nearest;
// r_out is at least 1, and r_in is at least 1 whenever configured non-zero.
std::pair<int, int> scaled_radii(const EdgeBandConfig& cfg, int frame_width);

MaskSequence edge_band_sequence(const MaskSequence& masks,
                                const EdgeBandConfig& cfg);

// Fills the masked pixels of every frame. Implementations may touch other
// pixels only at the cost of a ContractViolationError.
using InpaintFn =
    std::function<FrameSequence(const FrameSequence&, const MaskSequence&)>;

// Inpaints only the band. Output bytes outside the band equal the input; the
// worker is not called when every band is empty.
FrameSequence refine_edges(const FrameSequence& frames,
                           const MaskSequence& bands, const InpaintFn& worker);

// Checks an inpaint result against its request and merges it through the
// masks: ContractViolationError on length/shape mismatch or on any changed
// pixel outside the masks.
FrameSequence merge_inpaint_result(const FrameSequence& input,
                                   const MaskSequence& masks,
                                   const FrameSequence& result);

}  // namespace recast

#endif  // RECAST_EDGE_REFINE_H_
