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


#ifndef RECAST_HARMONIZE_H_
#define RECAST_HARMONIZE_H_

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "recast/color.h"
#include "recast/frame.h"
#include "recast/mask.h"

namespace recast {

// 3x4 affine colour transform in linear RGB, row-major:
//   out[c] = m[c][0] * r + m[c][1] * g + m[c][2] * b + m[c][3]
struct AffineColor {
  std::array<double, 12> m{};

  static AffineColor identity();
  static AffineColor gain_bias(const LinearColor& gain, const LinearColor& bias);

  double& at(int row, int col) { return m[static_cast<std::size_t>(row * 4 + col)]; }
  double at(int row, int col) const { return m[static_cast<std::size_t>(row * 4 + col)]; }
  bool is_finite() const;
  // No clamping.
  LinearColor apply(const LinearColor& in) const;

  bool operator==(const AffineColor&) const = default;
};

// outer(inner(x)).
AffineColor compose(const AffineColor& outer, const AffineColor& inner);

// Element-wise (1 - t) * a + t * b.
AffineColor blend_params(const AffineColor& a, const AffineColor& b, double t);

// Low-resolution transform field. Cell (i, j) is centred at
// ((i + 0.5) * stride, (j + 0.5) * stride) in pixel coordinates.
class ColorTransformGrid {
 public:
  static constexpr int kDefaultStride = 8;

  ColorTransformGrid() = default;
  ColorTransformGrid(int grid_w, int grid_h, int stride, AffineColor fill);
  // A grid sized ceil(width / stride) x ceil(height / stride).
  static ColorTransformGrid covering(int width, int height, int stride,
                                     AffineColor fill = AffineColor::identity());

  int grid_w() const { return grid_w_; }
  int grid_h() const { return grid_h_; }
  int stride() const { return stride_; }
  AffineColor& cell(int i, int j) { return cells_[static_cast<std::size_t>(j) * grid_w_ + i]; }
  const AffineColor& cell(int i, int j) const {
    return cells_[static_cast<std::size_t>(j) * grid_w_ + i];
  }
  const std::vector<AffineColor>& cells() const { return cells_; }
  bool covers(int width, int height) const;

  bool operator==(const ColorTransformGrid&) const = default;

 private:
  int grid_w_ = 0;
  int grid_h_ = 0;
  int stride_ = kDefaultStride;
  std::vector<AffineColor> cells_;
};

// Cell-wise blend; grids must share shape (ParamError otherwise).
ColorTransformGrid blend_params(const ColorTransformGrid& a,
                                const ColorTransformGrid& b, double t);

// `{"stride":8,"grid":[h][w][3][4]}`
std::string grid_to_json(const ColorTransformGrid& grid);
// Throws ProtocolError on malformed input, ParamError on non-finite values.
ColorTransformGrid grid_from_json(const std::string& text);

// One transform per pixel.
struct ParamField {
  int width = 0;
  int height = 0;
  std::vector<AffineColor> params;

  const AffineColor& at(int x, int y) const {
    return params[static_cast<std::size_t>(y) * width + x];
  }
};

// Bilinear lift of all 12 coefficients, clamped at the borders.
ParamField upsample_grid(const ColorTransformGrid& grid, int width, int height);

// Inside `mask`: decode to linear, transform, clamp to [0, 1], re-encode.
// Outside: bytes pass through. Throws ParamError on non-finite parameters.
Frame apply_pct(const Frame& frame, const ParamField& field, const Mask& mask);

struct BlockRange {
  std::size_t start = 0;  // inclusive
  std::size_t end = 0;    // exclusive
  std::size_t size() const { return end - start; }
  bool operator==(const BlockRange&) const = default;
};

struct BlockSchedule {
  std::vector<BlockRange> entries;
  std::size_t block_len = 16;
  std::size_t overlap = 4;
};

// Blocks start at k * (block_len - overlap) and run min(block_len, rest)
// frames. ConfigError unless 2 * overlap <= block_len and n_frames >= 1, so
// no frame falls in more than two blocks.
BlockSchedule partition_blocks(std::size_t n_frames, std::size_t block_len,
                               std::size_t overlap);

// Returns either one grid for the whole block or one per frame of the block.
using ParamsProvider = std::function<std::vector<ColorTransformGrid>(
    std::size_t block_index, const BlockRange& range)>;

// Per-frame grids from per-block grids. A frame shared by blocks i and i + 1
// uses blend_params(P_i, P_i+1, t) with t = (j - start_i+1 + 1) / (w + 1),
// w the overlap length. Frames in three or more blocks are rejected with
// ConfigError (overlap must not exceed half the block length).
std::vector<ColorTransformGrid> resolve_frame_params(
    const BlockSchedule& schedule,
    const std::vector<std::vector<ColorTransformGrid>>& block_params);

// Requests parameters per block, crossfades overlaps and applies them to the
// masked pixels of every frame. Provider failures surface as StageError with
// the block index; ContractViolationError and ProtocolError pass through.
FrameSequence harmonize_sequence(const FrameSequence& frames,
                                 const MaskSequence& masks,
                                 const ParamsProvider& provider,
                                 const BlockSchedule& schedule);

}  // namespace recast

#endif  // RECAST_HARMONIZE_H_
