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


#ifndef RECAST_FRAME_H_
#define RECAST_FRAME_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "recast/hash.h"

namespace recast {

// Frames per second as an exact ratio. Metadata only.
struct Rational {
  std::int64_t num = 24;
  std::int64_t den = 1;

  // Accepts "30000/1001" or a bare integer "24".
  static Rational parse(const std::string& text);
  std::string str() const;
  bool operator==(const Rational&) const = default;
};

// Row-major interleaved 8-bit raster, 3 (RGB) or 4 (RGBA) channels.
// Colour samples are sRGB encoded; alpha is linear and straight.
class Frame {
 public:
  Frame() = default;
  // Zero-filled.
  Frame(int width, int height, int channels);
  // Throws DimensionError unless data.size() == width * height * channels.
  Frame(int width, int height, int channels, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }

  const std::uint8_t* pixel(int x, int y) const {
    return data_.data() + (static_cast<std::size_t>(y) * width_ + x) * channels_;
  }
  std::uint8_t* pixel(int x, int y) {
    return data_.data() + (static_cast<std::size_t>(y) * width_ + x) * channels_;
  }

  bool same_shape(const Frame& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }
  bool operator==(const Frame&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

// Feeds a frame's canonical bytes (u32 width, height, channels, then raw rows
// top-to-bottom) into `hasher`.
void hash_frame(Hasher& hasher, const Frame& frame);

// An ordered clip of uniformly shaped frames. The id is derived from content
// on construction and never goes stale because frames are immutable here.
class FrameSequence {
 public:
  // Throws EmptyError for no frames and DimensionError for mixed shapes.
  explicit FrameSequence(std::vector<Frame> frames, Rational fps = {});

  const std::vector<Frame>& frames() const { return frames_; }
  const Frame& operator[](std::size_t i) const { return frames_[i]; }
  std::size_t size() const { return frames_.size(); }
  int width() const { return frames_.front().width(); }
  int height() const { return frames_.front().height(); }
  int channels() const { return frames_.front().channels(); }
  const Rational& fps() const { return fps_; }
  const ArtifactId& id() const { return id_; }

 private:
  std::vector<Frame> frames_;
  Rational fps_;
  ArtifactId id_;
};

}  // namespace recast

#endif  // RECAST_FRAME_H_
