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


#include "recast/morphology.h"

#include <algorithm>

#include "recast/error.h"

namespace recast {

namespace {

// prefix[y * (w + 1) + x] = number of set bits in row y before column x.
std::vector<int> row_prefix_sums(const Mask& mask) {
  const int w = mask.width();
  std::vector<int> prefix(static_cast<std::size_t>(w + 1) * mask.height(), 0);
  for (int y = 0; y < mask.height(); ++y) {
    int* row = prefix.data() + static_cast<std::size_t>(y) * (w + 1);
    for (int x = 0; x < w; ++x) row[x + 1] = row[x] + (mask.get(x, y) ? 1 : 0);
  }
  return prefix;
}

}  // namespace

DiskElement::DiskElement(int radius) : radius_(radius) {
  if (radius < 0) throw ParamError("disk radius must be non-negative");
  const long long r2 = static_cast<long long>(radius) * radius;
  for (int dy = -radius; dy <= radius; ++dy) {
    int hw = 0;
    while (static_cast<long long>(hw + 1) * (hw + 1) + static_cast<long long>(dy) * dy <= r2) {
      ++hw;
    }
    half_widths_.push_back(hw);
    for (int dx = -hw; dx <= hw; ++dx) offsets_.emplace_back(dx, dy);
  }
}

// Each disk row is a horizontal run, so a row-wise prefix sum answers "any
// set bit in the run" and "all bits set in the run" in O(1).
Mask dilate(const Mask& mask, int radius) {
  const DiskElement disk(radius);
  if (radius == 0) return mask;
  const int w = mask.width();
  const int h = mask.height();
  const auto prefix = row_prefix_sums(mask);
  Mask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool hit = false;
      for (int dy = -radius; dy <= radius && !hit; ++dy) {
        const int yy = y + dy;
        if (yy < 0 || yy >= h) continue;
        const int hw = disk.half_width(dy);
        const int lo = std::max(0, x - hw);
        const int hi = std::min(w - 1, x + hw);
        const int* row = prefix.data() + static_cast<std::size_t>(yy) * (w + 1);
        hit = row[hi + 1] - row[lo] > 0;
      }
      if (hit) out.set(x, y);
    }
  }
  return out;
}

Mask erode(const Mask& mask, int radius) {
  const DiskElement disk(radius);
  if (radius == 0) return mask;
  const int w = mask.width();
  const int h = mask.height();
  const auto prefix = row_prefix_sums(mask);
  Mask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool all = true;
      for (int dy = -radius; dy <= radius && all; ++dy) {
        const int yy = y + dy;
        const int hw = disk.half_width(dy);
        if (yy < 0 || yy >= h || x - hw < 0 || x + hw >= w) {
          all = false;
          break;
        }
        const int* row = prefix.data() + static_cast<std::size_t>(yy) * (w + 1);
        all = row[x + hw + 1] - row[x - hw] == 2 * hw + 1;
      }
      if (all) out.set(x, y);
    }
  }
  return out;
}

Mask edge_band(const Mask& mask, int r_out, int r_in) {
  const Mask outer = dilate(mask, r_out);
  const Mask inner = erode(mask, r_in);
  std::vector<std::uint8_t> bits(outer.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bits[i] = outer.bits()[i] & static_cast<std::uint8_t>(inner.bits()[i] ^ 1);
  }
  return Mask(mask.width(), mask.height(), std::move(bits));
}

}  // namespace recast
