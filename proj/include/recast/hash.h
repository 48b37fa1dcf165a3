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

#ifndef RECAST_HASH_H_
#define RECAST_HASH_H_

#include <array>
#include <compare>
#include <cstdint>
#include <istream>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace recast {

// SHA-256 digest identifying an artifact by content. Rendered as 64 lowercase
// hex characters.
class ArtifactId {
 public:
  static constexpr std::size_t kBytes = 32;

  ArtifactId() = default;
  explicit ArtifactId(const std::array<std::uint8_t, kBytes>& digest)
      : digest_(digest) {}

  // Throws ParamError unless `hex` is exactly 64 lowercase hex characters.
  static ArtifactId from_hex(std::string_view hex);
  static bool is_valid_hex(std::string_view hex);

  std::string hex() const;
  const std::array<std::uint8_t, kBytes>& bytes() const { return digest_; }

  auto operator<=>(const ArtifactId&) const = default;

 private:
  std::array<std::uint8_t, kBytes> digest_{};
};

// Streaming hasher. Feed any number of chunks, then call finish() once.
class Hasher {
 public:
  Hasher();
  ~Hasher();
  Hasher(Hasher&&) noexcept;
  Hasher& operator=(Hasher&&) noexcept;
  Hasher(const Hasher&) = delete;
  Hasher& operator=(const Hasher&) = delete;

  Hasher& update(std::span<const std::uint8_t> bytes);
  Hasher& update(std::string_view text);
  // Little-endian fixed-width integer, used for canonical headers.
  Hasher& update_u32(std::uint32_t value);
  ArtifactId finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ArtifactId artifact_hash(std::span<const std::uint8_t> bytes);
ArtifactId artifact_hash(std::string_view text);
// Reads `in` to EOF in fixed-size chunks.
ArtifactId artifact_hash(std::istream& in);

}  // namespace recast

#endif  // RECAST_HASH_H_
