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


#ifndef RECAST_COLOR_H_
#define RECAST_COLOR_H_

#include <array>
#include <cstdint>
#include <vector>

#include "recast/frame.h"

namespace recast {

// Linear-light RGB, nominally in [0, 1].
struct LinearColor {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  double& operator[](int c) { return c == 0 ? r : (c == 1 ? g : b); }
  double operator[](int c) const { return c == 0 ? r : (c == 1 ? g : b); }
};

// sRGB decoding of an 8-bit code value (table lookup).
double srgb_to_linear(std::uint8_t code);
// sRGB encoding after clamping to [0, 1]; rounds half up. Inverts
// srgb_to_linear exactly on all 256 codes.
std::uint8_t linear_to_srgb(double linear);

// Float image in linear light, 3 channels, row-major.
struct LinearImage {
  int width = 0;
  int height = 0;
  std::vector<LinearColor> pixels;

  LinearColor& at(int x, int y) {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  const LinearColor& at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
};

LinearImage to_linear(const Frame& frame);
// Quantises back to 8-bit RGB.
Frame to_srgb_frame(const LinearImage& image);

}  // namespace recast

#endif  // RECAST_COLOR_H_
