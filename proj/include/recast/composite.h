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


#ifndef RECAST_COMPOSITE_H_
#define RECAST_COMPOSITE_H_

#include "recast/frame.h"
#include "recast/mask.h"

namespace recast {

// Straight-alpha "over" in linear light: out = fg * a + bg * (1 - a) with
// a = fg.alpha / 255. fg must be RGBA, bg RGB, same size (DimensionError).
// Pixels with alpha 0 copy bg bytes and alpha 255 copy fg bytes exactly.
Frame composite_over(const Frame& fg, const Frame& bg);

// Frame-wise composite_over. LengthError on length mismatch.
FrameSequence composite_sequence(const FrameSequence& fg,
                                 const FrameSequence& bg);

// RGB frames plus masks -> RGBA with alpha 255 on set bits, 0 elsewhere.
FrameSequence mask_to_alpha(const FrameSequence& frames,
                            const MaskSequence& masks);

// Alpha >= kMaskThreshold, per frame. Frames must be RGBA.
MaskSequence alpha_to_masks(const FrameSequence& rgba);

}  // namespace recast

#endif  // RECAST_COMPOSITE_H_
