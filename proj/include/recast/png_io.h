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


#ifndef RECAST_PNG_IO_H_
#define RECAST_PNG_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "recast/frame.h"

namespace recast {

// 8-bit single-channel raster, used for mask images.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;
};

// Decodes any PNG to 8-bit RGB, or RGBA when the file carries alpha.
// Throws IoError on unreadable or malformed files.
Frame read_png(const std::filesystem::path& path);
GrayImage read_png_gray(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const Frame& frame);
void write_png(const std::filesystem::path& path, const GrayImage& image);

// In-memory encoders for the HTTP service.
std::string encode_png(const Frame& frame);
std::string encode_png(const GrayImage& image);

}  // namespace recast

#endif  // RECAST_PNG_IO_H_
