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


#include "recast/mask.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "recast/error.h"

namespace recast {

using nlohmann::json;

Mask::Mask(int width, int height) : Mask(width, height, {}) {}

Mask::Mask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (width < 1 || height < 1) {
    throw DimensionError("mask dimensions must be at least 1x1, got " +
                         std::to_string(width) + "x" + std::to_string(height));
  }
  const auto n = static_cast<std::size_t>(width) * height;
  if (bits_.empty()) {
    bits_.assign(n, 0);
  } else if (bits_.size() != n) {
    throw DimensionError("mask holds " + std::to_string(bits_.size()) +
                         " bits, expected " + std::to_string(n));
  }
  for (auto& b : bits_) b = b != 0 ? 1 : 0;
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

RleMask rle_encode(const Mask& mask) {
  RleMask rle{mask.width(), mask.height(), {}};
  std::uint8_t current = 0;
  std::uint32_t run = 0;
  for (std::uint8_t b : mask.bits()) {
    if (b != current) {
      rle.counts.push_back(run);
      run = 0;
      current = b;
    }
    ++run;
  }
  rle.counts.push_back(run);
  return rle;
}

Mask rle_decode(const RleMask& rle) {
  if (rle.width < 1 || rle.height < 1) {
    throw CorruptRleError("RLE dimensions must be positive");
  }
  const auto n = static_cast<std::uint64_t>(rle.width) * rle.height;
  std::uint64_t total = 0;
  for (auto c : rle.counts) total += c;
  if (total != n) {
    throw CorruptRleError("RLE counts sum to " + std::to_string(total) +
                          ", mask has " + std::to_string(n) + " pixels");
  }
  std::vector<std::uint8_t> bits;
  bits.reserve(n);
  std::uint8_t value = 0;
  for (auto c : rle.counts) {
    bits.insert(bits.end(), c, value);
    value ^= 1;
  }
  return Mask(rle.width, rle.height, std::move(bits));
}

double mask_iou(const Mask& a, const Mask& b) {
  if (!a.same_dims(b)) {
    throw DimensionError("IoU of masks with different dimensions");
  }
  std::size_t inter = 0;
  std::size_t uni = 0;
  const auto& ab = a.bits();
  const auto& bb = b.bits();
  for (std::size_t i = 0; i < ab.size(); ++i) {
    inter += ab[i] & bb[i];
    uni += ab[i] | bb[i];
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::optional<BBox> mask_bbox(const Mask& mask) {
  std::optional<BBox> box;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.get(x, y)) continue;
      if (!box) {
        box = BBox{x, y, x, y};
      } else {
        box->x_min = std::min(box->x_min, x);
        box->x_max = std::max(box->x_max, x);
        box->y_max = y;
      }
    }
  }
  return box;
}

Mask mask_from_gray(const GrayImage& image) {
  std::vector<std::uint8_t> bits(image.data.size());
  std::transform(image.data.begin(), image.data.end(), bits.begin(),
                 [](std::uint8_t v) { return v >= kMaskThreshold ? 1 : 0; });
  return Mask(image.width, image.height, std::move(bits));
}

GrayImage mask_to_gray(const Mask& mask) {
  GrayImage image{mask.width(), mask.height(), {}};
  image.data.resize(mask.size());
  std::transform(mask.bits().begin(), mask.bits().end(), image.data.begin(),
                 [](std::uint8_t b) { return b ? 255 : 0; });
  return image;
}

MaskSequence::MaskSequence(std::vector<Mask> masks) : masks_(std::move(masks)) {
  if (masks_.empty()) throw EmptyError("mask sequence has no frames");
  Hasher hasher;
  hasher.update("mask");
  for (std::size_t i = 0; i < masks_.size(); ++i) {
    if (!masks_[i].same_dims(masks_.front())) {
      throw DimensionError("mask " + std::to_string(i) +
                           " does not match the sequence dimensions");
    }
    hasher.update_u32(static_cast<std::uint32_t>(masks_[i].width()))
        .update_u32(static_cast<std::uint32_t>(masks_[i].height()))
        .update(masks_[i].bits());
  }
  id_ = hasher.finish();
}

std::string mask_sequence_to_json(const MaskSequence& seq) {
  json frames = json::array();
  for (const auto& m : seq.masks()) {
    frames.push_back({{"counts", rle_encode(m).counts}});
  }
  json doc = {{"dims", {seq.width(), seq.height()}}, {"frames", frames}};
  return doc.dump();
}

MaskSequence mask_sequence_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("mask sequence is not JSON: ") + e.what());
  }
  try {
    const auto& dims = doc.at("dims");
    if (!dims.is_array() || dims.size() != 2) {
      throw ProtocolError("mask sequence dims must be [w, h]");
    }
    const int w = dims.at(0).get<int>();
    const int h = dims.at(1).get<int>();
    std::vector<Mask> masks;
    for (const auto& f : doc.at("frames")) {
      RleMask rle{w, h, f.at("counts").get<std::vector<std::uint32_t>>()};
      masks.push_back(rle_decode(rle));
    }
    return MaskSequence(std::move(masks));
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed mask sequence: ") + e.what());
  }
}

void write_mask_sequence(const std::filesystem::path& path,
                         const MaskSequence& seq) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << mask_sequence_to_json(seq);
  if (!out.flush()) throw IoError("cannot write '" + path.string() + "'");
}

MaskSequence read_mask_sequence(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot read mask sequence '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return mask_sequence_from_json(text.str());
}

}  // namespace recast
