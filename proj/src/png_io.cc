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


#include "recast/png_io.h"

#include <png.h>

#include <cstring>

#include "recast/error.h"

namespace recast {

namespace {

struct PngImage {
  png_image image{};
  PngImage() {
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
};

void begin_read(PngImage& png, const std::filesystem::path& path) {
  if (png_image_begin_read_from_file(&png.image, path.c_str()) == 0) {
    throw IoError("cannot read PNG '" + path.string() + "': " +
                  png.image.message);
  }
}

void finish_read(PngImage& png, std::uint8_t* buffer,
                 const std::filesystem::path& path) {
  if (png_image_finish_read(&png.image, nullptr, buffer, 0, nullptr) == 0) {
    throw IoError("cannot decode PNG '" + path.string() + "': " +
                  png.image.message);
  }
}

void fill_header(PngImage& png, int width, int height, png_uint_32 format) {
  png.image.width = static_cast<png_uint_32>(width);
  png.image.height = static_cast<png_uint_32>(height);
  png.image.format = format;
}

std::string encode(PngImage& png, const std::uint8_t* pixels) {
  png_alloc_size_t size = 0;
  if (png_image_write_to_memory(&png.image, nullptr, &size, 0, pixels, 0,
                                nullptr) == 0) {
    throw IoError(std::string("PNG size query failed: ") + png.image.message);
  }
  std::string out(size, '\0');
  if (png_image_write_to_memory(&png.image, out.data(), &size, 0, pixels, 0,
                                nullptr) == 0) {
    throw IoError(std::string("PNG encode failed: ") + png.image.message);
  }
  out.resize(size);
  return out;
}

void write_file(PngImage& png, const std::filesystem::path& path,
                const std::uint8_t* pixels) {
  if (png_image_write_to_file(&png.image, path.c_str(), 0, pixels, 0,
                              nullptr) == 0) {
    throw IoError("cannot write PNG '" + path.string() + "': " +
                  png.image.message);
  }
}

}  // namespace

Frame read_png(const std::filesystem::path& path) {
  PngImage png;
  begin_read(png, path);
  const bool has_alpha = (png.image.format & PNG_FORMAT_FLAG_ALPHA) != 0;
  png.image.format = has_alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB;
  const int channels = has_alpha ? 4 : 3;
  std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(png.image));
  finish_read(png, data.data(), path);
  return Frame(static_cast<int>(png.image.width),
               static_cast<int>(png.image.height), channels, std::move(data));
}

GrayImage read_png_gray(const std::filesystem::path& path) {
  PngImage png;
  begin_read(png, path);
  png.image.format = PNG_FORMAT_GRAY;
  GrayImage out;
  out.width = static_cast<int>(png.image.width);
  out.height = static_cast<int>(png.image.height);
  out.data.resize(PNG_IMAGE_SIZE(png.image));
  finish_read(png, out.data.data(), path);
  return out;
}

void write_png(const std::filesystem::path& path, const Frame& frame) {
  PngImage png;
  fill_header(png, frame.width(), frame.height(),
              frame.channels() == 4 ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB);
  write_file(png, path, frame.data().data());
}

void write_png(const std::filesystem::path& path, const GrayImage& image) {
  PngImage png;
  fill_header(png, image.width, image.height, PNG_FORMAT_GRAY);
  write_file(png, path, image.data.data());
}

std::string encode_png(const Frame& frame) {
  PngImage png;
  fill_header(png, frame.width(), frame.height(),
              frame.channels() == 4 ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB);
  return encode(png, frame.data().data());
}

std::string encode_png(const GrayImage& image) {
  PngImage png;
  fill_header(png, image.width, image.height, PNG_FORMAT_GRAY);
  return encode(png, image.data.data());
}

}  // namespace recast
