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


#include "recast/frame.h"

#include <charconv>

#include "recast/error.h"

namespace recast {

namespace {

std::int64_t parse_int(std::string_view text, const std::string& whole) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("invalid frame rate '" + whole + "'");
  }
  return value;
}

}  // namespace

Rational Rational::parse(const std::string& text) {
  Rational r;
  const auto slash = text.find('/');
  if (slash == std::string::npos) {
    r.num = parse_int(text, text);
    r.den = 1;
  } else {
    r.num = parse_int(std::string_view(text).substr(0, slash), text);
    r.den = parse_int(std::string_view(text).substr(slash + 1), text);
  }
  if (r.num <= 0 || r.den <= 0) {
    throw ConfigError("frame rate must be positive: '" + text + "'");
  }
  return r;
}

std::string Rational::str() const {
  return std::to_string(num) + "/" + std::to_string(den);
}

Frame::Frame(int width, int height, int channels)
    : Frame(width, height, channels,
            std::vector<std::uint8_t>(static_cast<std::size_t>(
                width > 0 && height > 0 && channels > 0
                    ? static_cast<std::size_t>(width) * height * channels
                    : 0))) {}

Frame::Frame(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  if (width < 1 || height < 1) {
    throw DimensionError("frame dimensions must be at least 1x1, got " +
                         std::to_string(width) + "x" + std::to_string(height));
  }
  if (channels != 3 && channels != 4) {
    throw DimensionError("frames must have 3 or 4 channels, got " +
                         std::to_string(channels));
  }
  if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
    throw DimensionError("frame data holds " + std::to_string(data_.size()) +
                         " bytes, expected " +
                         std::to_string(static_cast<std::size_t>(width) *
                                        height * channels));
  }
}

void hash_frame(Hasher& hasher, const Frame& frame) {
  hasher.update_u32(static_cast<std::uint32_t>(frame.width()))
      .update_u32(static_cast<std::uint32_t>(frame.height()))
      .update_u32(static_cast<std::uint32_t>(frame.channels()))
      .update(frame.data());
}

FrameSequence::FrameSequence(std::vector<Frame> frames, Rational fps)
    : frames_(std::move(frames)), fps_(fps) {
  if (frames_.empty()) throw EmptyError("frame sequence has no frames");
  Hasher hasher;
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    if (!frames_[i].same_shape(frames_.front())) {
      throw DimensionError(
          "frame " + std::to_string(i) + " is " +
          std::to_string(frames_[i].width()) + "x" +
          std::to_string(frames_[i].height()) + "x" +
          std::to_string(frames_[i].channels()) + ", sequence is " +
          std::to_string(width()) + "x" + std::to_string(height()) + "x" +
          std::to_string(channels()));
    }
    hash_frame(hasher, frames_[i]);
  }
  id_ = hasher.finish();
}

}  // namespace recast
