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


#include "recast/color.h"

#include <algorithm>
#include <cmath>

namespace recast {

namespace {

double decode(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

const std::array<double, 256>& decode_table() {
  static const std::array<double, 256> table = [] {
    std::array<double, 256> t{};
    for (int i = 0; i < 256; ++i) t[i] = decode(i / 255.0);
    return t;
  }();
  return table;
}

}  // namespace

double srgb_to_linear(std::uint8_t code) { return decode_table()[code]; }

std::uint8_t linear_to_srgb(double linear) {
  if (!(linear > 0.0)) return 0;  // also maps NaN to 0
  if (linear >= 1.0) return 255;
  const double c = linear <= 0.0031308
                       ? 12.92 * linear
                       : 1.055 * std::pow(linear, 1.0 / 2.4) - 0.055;
  return static_cast<std::uint8_t>(
      std::clamp(std::floor(c * 255.0 + 0.5), 0.0, 255.0));
}

LinearImage to_linear(const Frame& frame) {
  LinearImage out{frame.width(), frame.height(), {}};
  out.pixels.resize(frame.pixel_count());
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      const std::uint8_t* p = frame.pixel(x, y);
      out.at(x, y) = {srgb_to_linear(p[0]), srgb_to_linear(p[1]),
                      srgb_to_linear(p[2])};
    }
  }
  return out;
}

Frame to_srgb_frame(const LinearImage& image) {
  Frame out(image.width, image.height, 3);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const LinearColor& c = image.at(x, y);
      std::uint8_t* p = out.pixel(x, y);
      p[0] = linear_to_srgb(c.r);
      p[1] = linear_to_srgb(c.g);
      p[2] = linear_to_srgb(c.b);
    }
  }
  return out;
}

}  // namespace recast
