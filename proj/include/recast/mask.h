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


#ifndef RECAST_MASK_H_
#define RECAST_MASK_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "recast/hash.h"
#include "recast/png_io.h"

namespace recast {

// Row-major binary occupancy; every element of `bits()` is 0 or 1.
class Mask {
 public:
  Mask() = default;
  // All-zero mask. Throws DimensionError for non-positive dims.
  Mask(int width, int height);
  // Any non-zero byte in `bits` counts as set.
  Mask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return bits_.size(); }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  bool get(int x, int y) const {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  // Out-of-image coordinates read as unset.
  bool get_or_unset(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_ && get(x, y);
  }
  void set(int x, int y, bool value = true) {
    bits_[static_cast<std::size_t>(y) * width_ + x] = value ? 1 : 0;
  }

  std::size_t count() const;
  bool empty() const { return count() == 0; }
  bool same_dims(const Mask& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }
  bool operator==(const Mask&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Run lengths over the row-major bit stream, alternating starting with a run
// of zeros (which may be empty).
struct RleMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint32_t> counts;
  bool operator==(const RleMask&) const = default;
};

RleMask rle_encode(const Mask& mask);
// Throws CorruptRleError when the counts do not sum to width * height.
Mask rle_decode(const RleMask& rle);

// |a & b| / |a | b|, and 1.0 when both are empty. Throws DimensionError.
double mask_iou(const Mask& a, const Mask& b);

struct BBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;
  bool operator==(const BBox&) const = default;
};

// Inclusive tight bounds over the set bits, absent for an empty mask.
std::optional<BBox> mask_bbox(const Mask& mask);

// Threshold for binarising grayscale mask images and alpha channels.
inline constexpr std::uint8_t kMaskThreshold = 128;

Mask mask_from_gray(const GrayImage& image);
// White (255) on black (0).
GrayImage mask_to_gray(const Mask& mask);

// Per-frame binary masks sharing one size.
class MaskSequence {
 public:
  // Throws EmptyError / DimensionError.
  explicit MaskSequence(std::vector<Mask> masks);

  const std::vector<Mask>& masks() const { return masks_; }
  const Mask& operator[](std::size_t i) const { return masks_[i]; }
  std::size_t size() const { return masks_.size(); }
  int width() const { return masks_.front().width(); }
  int height() const { return masks_.front().height(); }
  const ArtifactId& id() const { return id_; }

 private:
  std::vector<Mask> masks_;
  ArtifactId id_;
};

// `{"dims":[w,h],"frames":[{"counts":[...]}, ...]}` with no whitespace.
std::string mask_sequence_to_json(const MaskSequence& seq);
// Throws CorruptRleError / ProtocolError on malformed documents.
MaskSequence mask_sequence_from_json(const std::string& text);

void write_mask_sequence(const std::filesystem::path& path,
                         const MaskSequence& seq);
MaskSequence read_mask_sequence(const std::filesystem::path& path);

}  // namespace recast

#endif  // RECAST_MASK_H_
