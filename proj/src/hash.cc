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


#include "recast/hash.h"

#include <openssl/evp.h>

#include <vector>

#include "recast/error.h"

namespace recast {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

bool ArtifactId::is_valid_hex(std::string_view hex) {
  if (hex.size() != 2 * kBytes) return false;
  for (char c : hex) {
    if (hex_value(c) < 0) return false;
  }
  return true;
}

ArtifactId ArtifactId::from_hex(std::string_view hex) {
  if (!is_valid_hex(hex)) {
    throw ParamError("not a 64-character lowercase hex digest: '" +
                     std::string(hex) + "'");
  }
  std::array<std::uint8_t, kBytes> digest{};
  for (std::size_t i = 0; i < kBytes; ++i) {
    digest[i] = static_cast<std::uint8_t>(hex_value(hex[2 * i]) << 4 |
                                          hex_value(hex[2 * i + 1]));
  }
  return ArtifactId(digest);
}

std::string ArtifactId::hex() const {
  std::string out(2 * kBytes, '0');
  for (std::size_t i = 0; i < kBytes; ++i) {
    out[2 * i] = kHexDigits[digest_[i] >> 4];
    out[2 * i + 1] = kHexDigits[digest_[i] & 0xf];
  }
  return out;
}

struct Hasher::Impl {
  EVP_MD_CTX* ctx = nullptr;
  ~Impl() { EVP_MD_CTX_free(ctx); }
};

Hasher::Hasher() : impl_(std::make_unique<Impl>()) {
  impl_->ctx = EVP_MD_CTX_new();
  if (impl_->ctx == nullptr ||
      EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr) != 1) {
    throw Error("failed to initialise SHA-256 context");
  }
}

Hasher::~Hasher() = default;
Hasher::Hasher(Hasher&&) noexcept = default;
Hasher& Hasher::operator=(Hasher&&) noexcept = default;

Hasher& Hasher::update(std::span<const std::uint8_t> bytes) {
  if (!bytes.empty() &&
      EVP_DigestUpdate(impl_->ctx, bytes.data(), bytes.size()) != 1) {
    throw Error("SHA-256 update failed");
  }
  return *this;
}

Hasher& Hasher::update(std::string_view text) {
  return update(std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                          text.size()));
}

Hasher& Hasher::update_u32(std::uint32_t value) {
  const std::uint8_t le[4] = {
      static_cast<std::uint8_t>(value), static_cast<std::uint8_t>(value >> 8),
      static_cast<std::uint8_t>(value >> 16),
      static_cast<std::uint8_t>(value >> 24)};
  return update(std::span<const std::uint8_t>(le, 4));
}

ArtifactId Hasher::finish() {
  std::array<std::uint8_t, ArtifactId::kBytes> digest{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(impl_->ctx, digest.data(), &len) != 1 ||
      len != digest.size()) {
    throw Error("SHA-256 finalisation failed");
  }
  return ArtifactId(digest);
}

ArtifactId artifact_hash(std::span<const std::uint8_t> bytes) {
  return Hasher().update(bytes).finish();
}

ArtifactId artifact_hash(std::string_view text) {
  return Hasher().update(text).finish();
}

ArtifactId artifact_hash(std::istream& in) {
  Hasher hasher;
  std::vector<char> chunk(64 * 1024);
  while (in) {
    in.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got == 0) break;
    hasher.update(std::string_view(chunk.data(), got));
  }
  return hasher.finish();
}

}  // namespace recast
