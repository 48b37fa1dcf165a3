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


#include "recast/composite.h"

#include <algorithm>

#include "recast/color.h"
#include "recast/error.h"

namespace recast {

namespace {

void require_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw LengthError(std::string(what) + ": sequence lengths differ (" +
                      std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

Frame composite_over(const Frame& fg, const Frame& bg) {
  if (fg.channels() != 4) throw DimensionError("foreground must be RGBA");
  if (bg.channels() != 3) throw DimensionError("background must be RGB");
  if (fg.width() != bg.width() || fg.height() != bg.height()) {
    throw DimensionError("foreground and background sizes differ");
  }
  Frame out = bg;
  for (int y = 0; y < bg.height(); ++y) {
    for (int x = 0; x < bg.width(); ++x) {
      const std::uint8_t* f = fg.pixel(x, y);
      std::uint8_t* o = out.pixel(x, y);
      const std::uint8_t alpha = f[3];
      if (alpha == 0) continue;
      if (alpha == 255) {
        std::copy(f, f + 3, o);
        continue;
      }
      const double a = alpha / 255.0;
      for (int c = 0; c < 3; ++c) {
        const double lin = srgb_to_linear(f[c]) * a + srgb_to_linear(o[c]) * (1.0 - a);
        o[c] = linear_to_srgb(lin);
      }
    }
  }
  return out;
}

FrameSequence composite_sequence(const FrameSequence& fg,
                                 const FrameSequence& bg) {
  require_length(fg.size(), bg.size(), "composite");
  std::vector<Frame> out;
  out.reserve(bg.size());
  for (std::size_t i = 0; i < bg.size(); ++i) {
    out.push_back(composite_over(fg[i], bg[i]));
  }
  return FrameSequence(std::move(out), bg.fps());
}

FrameSequence mask_to_alpha(const FrameSequence& frames,
                            const MaskSequence& masks) {
  require_length(frames.size(), masks.size(), "mask_to_alpha");
  if (frames.width() != masks.width() || frames.height() != masks.height()) {
    throw DimensionError("mask and frame sizes differ");
  }
  if (frames.channels() != 3) throw DimensionError("mask_to_alpha needs RGB frames");
  std::vector<Frame> out;
  out.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    Frame rgba(frames.width(), frames.height(), 4);
    for (int y = 0; y < frames.height(); ++y) {
      for (int x = 0; x < frames.width(); ++x) {
        const std::uint8_t* s = frames[i].pixel(x, y);
        std::uint8_t* d = rgba.pixel(x, y);
        std::copy(s, s + 3, d);
        d[3] = masks[i].get(x, y) ? 255 : 0;
      }
    }
    out.push_back(std::move(rgba));
  }
  return FrameSequence(std::move(out), frames.fps());
}

MaskSequence alpha_to_masks(const FrameSequence& rgba) {
  if (rgba.channels() != 4) throw DimensionError("alpha_to_masks needs RGBA frames");
  std::vector<Mask> masks;
  masks.reserve(rgba.size());
  for (const Frame& f : rgba.frames()) {
    Mask m(f.width(), f.height());
    for (int y = 0; y < f.height(); ++y) {
      for (int x = 0; x < f.width(); ++x) {
        if (f.pixel(x, y)[3] >= kMaskThreshold) m.set(x, y);
      }
    }
    masks.push_back(std::move(m));
  }
  return MaskSequence(std::move(masks));
}

}  // namespace recast
