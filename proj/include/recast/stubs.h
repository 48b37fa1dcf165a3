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


#ifndef RECAST_STUBS_H_
#define RECAST_STUBS_H_

// Deterministic stand-ins for the neural stages. All of them are pure
// functions of their inputs: no clocks, no random numbers.

#include <optional>

#include "recast/frame.h"
#include "recast/harmonize.h"
#include "recast/mask.h"
#include "recast/pose.h"
#include "recast/prompt.h"

namespace recast {

// 4-connected region of pixels whose RGB Euclidean distance (in 8-bit code
// values) to the seed pixel's colour is <= tau.
Mask flood_fill(const Frame& frame, int seed_x, int seed_y, double tau);

// Centroid of the set bits rounded half up; nullopt for empty masks.
std::optional<std::pair<int, int>> mask_centroid(const Mask& mask);

// Flood-fills the prompted frame, then walks forwards and backwards
// re-seeding each frame at the neighbouring frame's mask centroid.
MaskSequence stub_segment_track(const FrameSequence& frames,
                                const Prompt& prompt, double tau);

// Masked pixels start at the mean linear colour of the mask's outer 1-px ring
// and then take `iters` Jacobi steps of 4-neighbour averaging (off-image
// neighbours excluded). Throws UninpaintableError for full-frame masks.
Frame stub_inpaint_frame(const Frame& frame, const Mask& mask, int iters);
FrameSequence stub_inpaint(const FrameSequence& frames,
                           const MaskSequence& masks, int iters);

// Skeleton laid out inside the mask's bounding box; an all-zero-confidence
// set for empty masks.
KeypointSet pose_from_bbox(const std::optional<BBox>& box);
PoseSequence stub_pose(const MaskSequence& masks);

// Similarity transform taking the reference's hip-midpoint -> shoulder-
// midpoint segment onto each target pose, bilinear resampling onto a
// transparent `scene_width` x `scene_height` RGBA canvas.
FrameSequence stub_animate(const ReferenceCharacter& ref,
                           const PoseSequence& poses, int scene_width,
                           int scene_height);

inline constexpr double kHarmonizeEpsilon = 1e-4;

struct HarmonizeStats {
  LinearColor fg_mean;
  LinearColor fg_std;
  LinearColor ring_mean;
  LinearColor ring_std;
  std::size_t fg_count = 0;
  std::size_t ring_count = 0;
};

// Linear-RGB statistics of foreground pixels and of the background ring
// (dilate(mask, ring_width) minus mask), pooled over `range`.
HarmonizeStats harmonize_stats(const FrameSequence& composite,
                               const MaskSequence& masks,
                               const BlockRange& range, int ring_width);

// Constant grid with gain sigma_ring / max(sigma_fg, eps) and bias
// mu_ring - gain * mu_fg per channel. Falls back to identity (and sets
// `*fell_back`) when the block has no foreground or no ring.
ColorTransformGrid stub_harmonize_params(const FrameSequence& composite,
                                         const MaskSequence& masks,
                                         const BlockRange& range,
                                         int ring_width, int stride,
                                         bool* fell_back = nullptr);

}  // namespace recast

#endif  // RECAST_STUBS_H_
