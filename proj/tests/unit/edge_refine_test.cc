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


#include <random>

#include "doctest.h"
#include "recast/edge_refine.h"
#include "recast/error.h"
#include "recast/morphology.h"
#include "recast/stubs.h"
#include "support/fixtures.h"
#include "support/oracles.h"

namespace recast {
namespace {

EdgeBandConfig native(int r_out, int r_in, int width) {
  EdgeBandConfig cfg;
  cfg.r_out = r_out;
  cfg.r_in = r_in;
  cfg.scale_reference_width = width;
  return cfg;
}

Frame random_frame(std::mt19937& rng, int w, int h) {
  Frame f(w, h, 3);
  for (auto& b : f.data()) b = static_cast<std::uint8_t>(rng());
  return f;
}

TEST_SUITE("edge_refine") {

TEST_CASE("config validation") {
  CHECK_NOTHROW(EdgeBandConfig{}.validate());
  CHECK_THROWS_AS(native(0, 1, 64).validate(), ConfigError);
  CHECK_THROWS_AS(native(1, -1, 64).validate(), ConfigError);
  CHECK_THROWS_AS(native(1, 1, 0).validate(), ConfigError);
}

TEST_CASE("radii scale with frame width") {
  const EdgeBandConfig cfg;  // 6 and 2 at 1024 px
  CHECK(scaled_radii(cfg, 1024) == std::make_pair(6, 2));
  CHECK(scaled_radii(cfg, 2048) == std::make_pair(12, 4));
  CHECK(scaled_radii(cfg, 512) == std::make_pair(3, 1));
  CHECK(scaled_radii(cfg, 128) == std::make_pair(1, 1));
  CHECK(scaled_radii(native(6, 0, 1024), 128) == std::make_pair(1, 0));
}

TEST_CASE("empty masks give empty bands") {
  const MaskSequence bands =
      edge_band_sequence(MaskSequence({Mask(8, 8), Mask(8, 8)}), native(2, 1, 8));
  for (const auto& b : bands.masks()) CHECK(b.empty());
}

TEST_CASE("a filled square's band matches the morphology oracle") {
  Mask m(24, 24);
  for (int y = 6; y < 16; ++y) {
    for (int x = 5; x < 15; ++x) m.set(x, y);
  }
  const MaskSequence bands = edge_band_sequence(MaskSequence({m}), native(3, 2, 24));
  const Mask outer = testing::oracle_dilate(m, 3);
  const Mask inner = testing::oracle_erode(m, 2);
  for (int y = 0; y < 24; ++y) {
    for (int x = 0; x < 24; ++x) {
      CHECK(bands[0].get(x, y) == (outer.get(x, y) && !inner.get(x, y)));
    }
  }
}

TEST_CASE("bands are non-empty for partial masks") {
  std::mt19937 rng(10);
  for (int k = 0; k < 200; ++k) {
    const Mask m = testing::random_mask(rng, 12, 12, 0.02 + 0.96 * (k % 11) / 10.0);
    if (m.empty() || m.count() == m.size()) continue;
    const MaskSequence bands = edge_band_sequence(MaskSequence({m}), native(1, 1, 12));
    CHECK(bands[0].count() > 0);
  }
}

TEST_CASE("bands cover every contour crossing") {
  std::mt19937 rng(11);
  for (int k = 0; k < 100; ++k) {
    const Mask m = testing::random_mask(rng, 16, 16, 0.5);
    const Mask band = edge_band_sequence(MaskSequence({m}), native(1, 1, 16))[0];
    for (int y = 0; y < 16; ++y) {
      for (int x = 0; x < 16; ++x) {
        const int dx[] = {1, 0};
        const int dy[] = {0, 1};
        for (int d = 0; d < 2; ++d) {
          const int nx = x + dx[d], ny = y + dy[d];
          if (nx >= 16 || ny >= 16 || m.get(x, y) == m.get(nx, ny)) continue;
          REQUIRE(band.get(x, y));
          REQUIRE(band.get(nx, ny));
        }
      }
    }
  }
}

TEST_CASE("empty bands skip the worker") {
  std::mt19937 rng(1);
  const FrameSequence frames({random_frame(rng, 8, 8), random_frame(rng, 8, 8)});
  bool called = false;
  const FrameSequence out =
      refine_edges(frames, MaskSequence({Mask(8, 8), Mask(8, 8)}),
                   [&](const FrameSequence& f, const MaskSequence&) {
                     called = true;
                     return f;
                   });
  CHECK_FALSE(called);
  CHECK(out.id() == frames.id());
}

TEST_CASE("stub inpaint on a constant frame is a fixed point") {
  Frame flat(20, 20, 3);
  for (auto& b : flat.data()) b = 77;
  Mask m(20, 20);
  for (int y = 5; y < 12; ++y) {
    for (int x = 3; x < 15; ++x) m.set(x, y);
  }
  const MaskSequence bands = edge_band_sequence(MaskSequence({m}), native(2, 1, 20));
  const FrameSequence frames({flat});
  const FrameSequence out =
      refine_edges(frames, bands, [](const FrameSequence& f, const MaskSequence& b) {
        return stub_inpaint(f, b, 50);
      });
  CHECK(out[0] == flat);
}

TEST_CASE("pixels outside the band are never altered") {
  std::mt19937 rng(2);
  const Frame f = random_frame(rng, 24, 24);
  Mask m(24, 24);
  for (int y = 8; y < 18; ++y) {
    for (int x = 6; x < 16; ++x) m.set(x, y);
  }
  const MaskSequence bands = edge_band_sequence(MaskSequence({m}), native(2, 1, 24));
  const FrameSequence out = refine_edges(
      FrameSequence({f}), bands,
      [](const FrameSequence& in, const MaskSequence& b) { return stub_inpaint(in, b, 30); });
  std::size_t changed_inside = 0;
  for (int y = 0; y < 24; ++y) {
    for (int x = 0; x < 24; ++x) {
      const bool same = std::equal(f.pixel(x, y), f.pixel(x, y) + 3, out[0].pixel(x, y));
      if (!bands[0].get(x, y)) CHECK(same);
      if (bands[0].get(x, y) && !same) ++changed_inside;
    }
  }
  CHECK(changed_inside > 0);
}

TEST_CASE("a worker touching out-of-band pixels is a contract violation") {
  std::mt19937 rng(3);
  const FrameSequence frames({random_frame(rng, 8, 8)});
  Mask band(8, 8);
  band.set(4, 4);
  CHECK_THROWS_AS(refine_edges(frames, MaskSequence({band}),
                               [](const FrameSequence& f, const MaskSequence&) {
                                 Frame bad = f[0];
                                 bad.pixel(0, 0)[0] ^= 0xff;
                                 return FrameSequence({bad});
                               }),
                  ContractViolationError);
}

TEST_CASE("merge rejects wrong lengths and shapes") {
  const FrameSequence two({Frame(4, 4, 3), Frame(4, 4, 3)});
  const MaskSequence masks({Mask(4, 4), Mask(4, 4)});
  CHECK_THROWS_AS(merge_inpaint_result(two, masks, FrameSequence({Frame(4, 4, 3)})),
                  ContractViolationError);
  CHECK_THROWS_AS(
      merge_inpaint_result(two, masks, FrameSequence({Frame(5, 4, 3), Frame(5, 4, 3)})),
      ContractViolationError);
}

TEST_CASE("refinement is deterministic") {
  std::mt19937 rng(4);
  const Frame f = random_frame(rng, 16, 16);
  Mask m(16, 16);
  for (int y = 4; y < 12; ++y) {
    for (int x = 4; x < 12; ++x) m.set(x, y);
  }
  const MaskSequence bands = edge_band_sequence(MaskSequence({m}), native(2, 1, 16));
  auto run = [&] {
    return refine_edges(FrameSequence({f}), bands,
                        [](const FrameSequence& in, const MaskSequence& b) {
                          return stub_inpaint(in, b, 20);
                        })
        .id();
  };
  CHECK(run() == run());
}

}  // TEST_SUITE

}  // namespace
}  // namespace recast
