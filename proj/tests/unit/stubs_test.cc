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


#include <cmath>
#include <random>

#include "doctest.h"
#include "recast/color.h"
#include "recast/composite.h"
#include "recast/error.h"
#include "recast/harmonize.h"
#include "recast/morphology.h"
#include "recast/stubs.h"
#include "support/fixtures.h"
#include "support/oracles.h"

namespace recast {
namespace {

Frame solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Frame f(w, h, 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      f.pixel(x, y)[0] = r;
      f.pixel(x, y)[1] = g;
      f.pixel(x, y)[2] = b;
    }
  }
  return f;
}

Mask rect_mask(int w, int h, int x0, int y0, int rw, int rh) {
  Mask m(w, h);
  for (int y = y0; y < y0 + rh; ++y) {
    for (int x = x0; x < x0 + rw; ++x) m.set(x, y);
  }
  return m;
}

Prompt point_prompt(int x, int y, std::size_t frame = 0) {
  Prompt p;
  p.frame_index = frame;
  p.points.push_back({x, y, true});
  return p;
}

Mask alpha_support(const Frame& rgba) {
  Mask m(rgba.width(), rgba.height());
  for (int y = 0; y < rgba.height(); ++y) {
    for (int x = 0; x < rgba.width(); ++x) m.set(x, y, rgba.pixel(x, y)[3] >= 128);
  }
  return m;
}

TEST_SUITE("stubs") {

TEST_CASE("red square on white segments exactly on every frame") {
  std::vector<Frame> frames;
  std::vector<Mask> truth;
  for (int i = 0; i < 5; ++i) {
    Frame f = solid(40, 30, 255, 255, 255);
    const Mask m = rect_mask(40, 30, 5 + 2 * i, 8, 10, 10);
    for (int y = 0; y < 30; ++y) {
      for (int x = 0; x < 40; ++x) {
        if (!m.get(x, y)) continue;
        f.pixel(x, y)[1] = 0;
        f.pixel(x, y)[2] = 0;
      }
    }
    frames.push_back(std::move(f));
    truth.push_back(m);
  }
  const MaskSequence masks =
      stub_segment_track(FrameSequence(frames), point_prompt(9, 12), 30.0);
  REQUIRE(masks.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(masks[i] == truth[i]);
}

TEST_CASE("flood fill at tau zero matches the oracle") {
  std::mt19937 rng(1);
  for (int k = 0; k < 30; ++k) {
    Frame f(20, 20, 3);
    // Few colours so regions are large and ragged.
    for (int y = 0; y < 20; ++y) {
      for (int x = 0; x < 20; ++x) {
        const std::uint8_t v = static_cast<std::uint8_t>(rng() % 3 == 0 ? 10 : 200);
        f.pixel(x, y)[0] = f.pixel(x, y)[1] = f.pixel(x, y)[2] = v;
      }
    }
    const int sx = static_cast<int>(rng() % 20), sy = static_cast<int>(rng() % 20);
    CHECK(flood_fill(f, sx, sy, 0.0) == testing::oracle_flood_fill(f, sx, sy, 0.0));
  }
}

TEST_CASE("flood fill on noisy frames matches the oracle for several tau") {
  std::mt19937 rng(2);
  for (int k = 0; k < 20; ++k) {
    Frame f(16, 16, 3);
    for (auto& b : f.data()) b = static_cast<std::uint8_t>(100 + rng() % 40);
    for (double tau : {0.0, 10.0, 25.0, 40.0}) {
      CHECK(flood_fill(f, 8, 8, tau) == testing::oracle_flood_fill(f, 8, 8, tau));
    }
  }
}

TEST_CASE("flood fill argument checks") {
  const Frame f = solid(4, 4, 1, 2, 3);
  CHECK_THROWS_AS(flood_fill(f, 4, 0, 10.0), PromptError);
  CHECK_THROWS_AS(flood_fill(f, 0, -1, 10.0), PromptError);
  CHECK_THROWS_AS(flood_fill(f, 0, 0, -1.0), ParamError);
}

TEST_CASE("moving square tracks with IoU one") {
  const testing::Clip clip = testing::moving_square_clip();
  const MaskSequence masks = stub_segment_track(clip.frames, testing::square_prompt(), 30.0);
  REQUIRE(masks.size() == clip.truth.size());
  for (std::size_t i = 0; i < masks.size(); ++i) CHECK(mask_iou(masks[i], clip.truth[i]) == 1.0);
}

TEST_CASE("tracking from a middle frame walks both ways") {
  const testing::Clip clip = testing::moving_square_clip(9);
  const MaskSequence masks = stub_segment_track(
      clip.frames, point_prompt(testing::square_x(4) + 3, testing::kSquareY0 + 3, 4), 30.0);
  for (std::size_t i = 0; i < masks.size(); ++i) CHECK(masks[i] == clip.truth[i]);
}

TEST_CASE("segmentation is translation equivariant") {
  const int dx = 5, dy = 3;
  const testing::Clip clip = testing::moving_square_clip(6, 100, 100);
  std::vector<Frame> shifted;
  for (const Frame& f : clip.frames.frames()) {
    Frame s(100, 100, 3);
    testing::paint_background(s);
    for (int y = 0; y + dy < 100; ++y) {
      for (int x = 0; x + dx < 100; ++x) {
        std::copy(f.pixel(x, y), f.pixel(x, y) + 3, s.pixel(x + dx, y + dy));
      }
    }
    shifted.push_back(std::move(s));
  }
  const Prompt p = testing::square_prompt();
  const MaskSequence a = stub_segment_track(clip.frames, p, 30.0);
  const MaskSequence b = stub_segment_track(
      FrameSequence(shifted), point_prompt(p.points[0].x + dx, p.points[0].y + dy), 30.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (int y = 0; y + dy < 100; ++y) {
      for (int x = 0; x + dx < 100; ++x) REQUIRE(a[i].get(x, y) == b[i].get(x + dx, y + dy));
    }
  }
}

TEST_CASE("each frame is flooded from the colour under the previous centroid") {
  std::vector<Frame> frames = {solid(10, 10, 255, 0, 0), solid(10, 10, 0, 0, 255)};
  const MaskSequence masks = stub_segment_track(FrameSequence(frames), point_prompt(5, 5), 30.0);
  CHECK(masks[0].count() == 100);
  CHECK(masks[1].count() == 100);
}

TEST_CASE("centroid rounds half up") {
  Mask m(6, 6);
  m.set(1, 1);
  m.set(2, 1);
  CHECK(mask_centroid(m) == std::make_pair(2, 1));
  CHECK_FALSE(mask_centroid(Mask(3, 3)).has_value());
}

TEST_CASE("inpaint fixed point on a constant frame") {
  const Frame flat = solid(12, 9, 30, 140, 200);
  CHECK(stub_inpaint_frame(flat, rect_mask(12, 9, 3, 2, 5, 4), 100) == flat);
}

TEST_CASE("inpaint with an empty mask returns the input") {
  std::mt19937 rng(3);
  Frame f(8, 8, 3);
  for (auto& b : f.data()) b = static_cast<std::uint8_t>(rng());
  CHECK(stub_inpaint_frame(f, Mask(8, 8), 100) == f);
}

TEST_CASE("a one pixel hole converges to its neighbour average") {
  Frame f(3, 1, 3);
  const std::uint8_t left = linear_to_srgb(0.2);
  const std::uint8_t right = linear_to_srgb(0.4);
  for (int c = 0; c < 3; ++c) {
    f.pixel(0, 0)[c] = left;
    f.pixel(2, 0)[c] = right;
  }
  Mask hole(3, 1);
  hole.set(1, 0);
  const Frame out = stub_inpaint_frame(f, hole, 500);
  const double expected = (srgb_to_linear(left) + srgb_to_linear(right)) / 2.0;
  CHECK(out.pixel(1, 0)[0] == linear_to_srgb(expected));
  CHECK(out.pixel(0, 0)[0] == left);
  CHECK(out.pixel(2, 0)[0] == right);
}

TEST_CASE("inpaint never changes unmasked pixels") {
  std::mt19937 rng(4);
  for (int k = 0; k < 20; ++k) {
    Frame f(16, 16, 3);
    for (auto& b : f.data()) b = static_cast<std::uint8_t>(rng());
    const Mask m = testing::random_mask(rng, 16, 16, 0.3);
    if (m.count() == m.size()) continue;
    const Frame out = stub_inpaint_frame(f, m, 40);
    for (int y = 0; y < 16; ++y) {
      for (int x = 0; x < 16; ++x) {
        if (m.get(x, y)) continue;
        REQUIRE(std::equal(f.pixel(x, y), f.pixel(x, y) + 3, out.pixel(x, y)));
      }
    }
  }
}

TEST_CASE("a full-frame hole cannot be inpainted") {
  CHECK_THROWS_AS(
      stub_inpaint_frame(solid(4, 4, 1, 1, 1), rect_mask(4, 4, 0, 0, 4, 4), 10),
      UninpaintableError);
}

TEST_CASE("inpainting RGBA keeps alpha") {
  Frame f(6, 6, 4);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 6; ++x) {
      f.pixel(x, y)[0] = static_cast<std::uint8_t>(40 * x);
      f.pixel(x, y)[3] = 99;
    }
  }
  const Frame out = stub_inpaint_frame(f, rect_mask(6, 6, 2, 2, 2, 2), 20);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 6; ++x) CHECK(out.pixel(x, y)[3] == 99);
  }
}

TEST_CASE("pose of an empty mask is absent") {
  const KeypointSet set = pose_from_bbox(std::nullopt);
  CHECK(is_absent(set));
  for (const auto& k : set) CHECK(k.confidence == 0.0);
}

TEST_CASE("pose nose sits at the box centre") {
  const KeypointSet set = pose_from_bbox(mask_bbox(rect_mask(40, 40, 10, 10, 10, 10)));
  CHECK(set[kNose].x == 14.5);
  CHECK(set[kNose].confidence == 1.0);
  CHECK(set[kLeftShoulder].x > set[kRightShoulder].x);
  CHECK(set[kLeftHip].y > set[kLeftShoulder].y);
  CHECK(set[kLeftAnkle].y == 19.0);
}

TEST_CASE("translating the mask translates every keypoint") {
  std::mt19937 rng(5);
  for (int k = 0; k < 50; ++k) {
    const int x0 = static_cast<int>(rng() % 20), y0 = static_cast<int>(rng() % 20);
    const int w = 1 + static_cast<int>(rng() % 20), h = 1 + static_cast<int>(rng() % 20);
    const int tx = static_cast<int>(rng() % 15), ty = static_cast<int>(rng() % 15);
    const KeypointSet a = pose_from_bbox(mask_bbox(rect_mask(64, 64, x0, y0, w, h)));
    const KeypointSet b =
        pose_from_bbox(mask_bbox(rect_mask(64, 64, x0 + tx, y0 + ty, w, h)));
    for (std::size_t j = 0; j < kNumKeypoints; ++j) {
      CHECK(b[j].x - a[j].x == doctest::Approx(tx).epsilon(1e-12));
      CHECK(b[j].y - a[j].y == doctest::Approx(ty).epsilon(1e-12));
      CHECK(b[j].confidence == a[j].confidence);
    }
  }
}

TEST_CASE("stub pose validates and keeps one set per frame") {
  const testing::Clip clip = testing::moving_square_clip(4);
  const PoseSequence poses = stub_pose(clip.truth);
  CHECK(poses.frames.size() == 4);
  CHECK_NOTHROW(poses.validate());
  CHECK(poses.frames[1][kNose].x - poses.frames[0][kNose].x == 1.0);
}

TEST_CASE("animating onto the reference's own anchors is the identity placement") {
  const Frame ref = testing::blue_reference();
  const KeypointSet anchor = pose_from_bbox(mask_bbox(alpha_support(ref)));
  PoseSequence poses{ref.width(), ref.height(), {anchor}};
  const FrameSequence out = stub_animate({ref, std::nullopt}, poses, ref.width(), ref.height());
  CHECK(alpha_support(out[0]) == alpha_support(ref));
  CHECK(out[0] == ref);
}

TEST_CASE("a pose scaled by two doubles the support height") {
  const Frame ref = testing::blue_reference();
  const BBox rb = *mask_bbox(alpha_support(ref));
  const BBox target{2 * rb.x_min, 2 * rb.y_min, 2 * rb.x_max, 2 * rb.y_max};
  PoseSequence poses{160, 220, {pose_from_bbox(target)}};
  const FrameSequence out = stub_animate({ref, std::nullopt}, poses, 160, 220);
  const Mask support = alpha_support(out[0]);
  const BBox ob = *mask_bbox(support);
  const int ref_h = rb.y_max - rb.y_min + 1;
  const int out_h = ob.y_max - ob.y_min + 1;
  CHECK(std::abs(out_h - 2 * ref_h) <= 1);
  // Area follows the squared scale.
  const double expected = 4.0 * static_cast<double>(alpha_support(ref).count());
  CHECK(std::abs(static_cast<double>(support.count()) - expected) <= 0.05 * expected);
}

TEST_CASE("area is preserved under rotation and non-integer scale") {
  const Frame ref = testing::blue_reference();
  const KeypointSet anchor = pose_from_bbox(mask_bbox(alpha_support(ref)));
  // Rotate the torso segment by 30 degrees and scale it by 1.3 about the hip.
  const double hx = (anchor[kLeftHip].x + anchor[kRightHip].x) / 2;
  const double hy = (anchor[kLeftHip].y + anchor[kRightHip].y) / 2;
  const double c = 1.3 * std::cos(0.5235987755982988), s = 1.3 * std::sin(0.5235987755982988);
  KeypointSet moved = anchor;
  for (auto& k : moved) {
    const double ox = k.x - hx, oy = k.y - hy;
    k.x = 80 + c * ox - s * oy;
    k.y = 90 + s * ox + c * oy;
  }
  PoseSequence poses{160, 180, {moved}};
  const FrameSequence out = stub_animate({ref, anchor}, poses, 160, 180);
  const double expected = 1.69 * static_cast<double>(alpha_support(ref).count());
  CHECK(std::abs(alpha_support(out[0]).count() - expected) <= 0.05 * expected);
}

TEST_CASE("zero-confidence frames animate to transparency") {
  PoseSequence poses{32, 32, {KeypointSet{}}};
  const FrameSequence out = stub_animate({testing::blue_reference(), std::nullopt}, poses, 32, 32);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) CHECK(out[0].pixel(x, y)[3] == 0);
  }
}

TEST_CASE("animate argument checks") {
  PoseSequence poses{32, 32, {KeypointSet{}}};
  CHECK_THROWS_AS(stub_animate({Frame(8, 8, 3), std::nullopt}, poses, 32, 32), ParamError);
  KeypointSet collapsed = pose_from_bbox(BBox{4, 4, 20, 20});
  collapsed[kLeftShoulder] = collapsed[kLeftHip];
  collapsed[kRightShoulder] = collapsed[kRightHip];
  PoseSequence degenerate{32, 32, {collapsed}};
  CHECK_THROWS_AS(stub_animate({testing::blue_reference(), std::nullopt}, degenerate, 32, 32),
                  DegeneratePoseError);
}

TEST_CASE("matching statistics give the identity transform") {
  // Foreground and ring both alternate between the same two codes.
  Frame f(24, 24, 3);
  for (int y = 0; y < 24; ++y) {
    for (int x = 0; x < 24; ++x) {
      const std::uint8_t v = (x + y) % 2 == 0 ? 60 : 180;
      f.pixel(x, y)[0] = f.pixel(x, y)[1] = f.pixel(x, y)[2] = v;
    }
  }
  const Mask m = rect_mask(24, 24, 6, 6, 12, 12);
  const FrameSequence frames({f});
  const MaskSequence masks({m});
  const HarmonizeStats st = harmonize_stats(frames, masks, {0, 1}, 4);
  bool fell_back = true;
  const ColorTransformGrid g = stub_harmonize_params(frames, masks, {0, 1}, 4, 8, &fell_back);
  CHECK_FALSE(fell_back);
  for (int c = 0; c < 3; ++c) {
    CHECK(st.fg_mean[c] == doctest::Approx(st.ring_mean[c]).epsilon(1e-3));
    CHECK(g.cell(0, 0).at(c, c) == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(std::abs(g.cell(0, 0).at(c, 3)) < 1e-2);
  }
}

TEST_CASE("constant foreground is moved onto the ring mean") {
  const std::uint8_t fg = linear_to_srgb(0.2), ring = linear_to_srgb(0.6);
  Frame f = solid(20, 20, ring, ring, ring);
  const Mask m = rect_mask(20, 20, 5, 5, 10, 10);
  for (int y = 5; y < 15; ++y) {
    for (int x = 5; x < 15; ++x) f.pixel(x, y)[0] = f.pixel(x, y)[1] = f.pixel(x, y)[2] = fg;
  }
  const ColorTransformGrid g =
      stub_harmonize_params(FrameSequence({f}), MaskSequence({m}), {0, 1}, 3, 8);
  for (const auto& cell : g.cells()) {
    const LinearColor out = cell.apply({srgb_to_linear(fg), srgb_to_linear(fg), srgb_to_linear(fg)});
    for (int c = 0; c < 3; ++c) CHECK(out[c] == doctest::Approx(srgb_to_linear(ring)).epsilon(1e-9));
  }
}

TEST_CASE("transformed foreground mean equals the ring mean") {
  std::mt19937 rng(6);
  for (int k = 0; k < 10; ++k) {
    Frame f(32, 32, 3);
    for (auto& b : f.data()) b = static_cast<std::uint8_t>(rng());
    const Mask m = rect_mask(32, 32, 8, 6, 14, 17);
    const FrameSequence frames({f});
    const MaskSequence masks({m});
    const HarmonizeStats st = harmonize_stats(frames, masks, {0, 1}, 4);
    const ColorTransformGrid g = stub_harmonize_params(frames, masks, {0, 1}, 4, 8);
    const ParamField field = upsample_grid(g, 32, 32);
    LinearColor sum;
    const LinearImage lin = to_linear(f);
    for (int y = 0; y < 32; ++y) {
      for (int x = 0; x < 32; ++x) {
        if (!m.get(x, y)) continue;
        const LinearColor o = field.at(x, y).apply(lin.at(x, y));
        for (int c = 0; c < 3; ++c) sum[c] += o[c];
      }
    }
    for (int c = 0; c < 3; ++c) {
      CHECK(std::abs(sum[c] / static_cast<double>(m.count()) - st.ring_mean[c]) < 1e-3);
    }
  }
}

TEST_CASE("blocks without foreground fall back to identity") {
  bool fell_back = false;
  const ColorTransformGrid g = stub_harmonize_params(
      FrameSequence({solid(16, 16, 9, 9, 9)}), MaskSequence({Mask(16, 16)}), {0, 1}, 4, 8,
      &fell_back);
  CHECK(fell_back);
  for (const auto& cell : g.cells()) CHECK(cell == AffineColor::identity());
}

TEST_CASE("stubs are pure") {
  const testing::Clip clip = testing::moving_square_clip(4);
  const auto a = stub_inpaint(clip.frames, clip.truth, 30).id();
  const auto b = stub_inpaint(clip.frames, clip.truth, 30).id();
  CHECK(a == b);
}

}  // TEST_SUITE

}  // namespace
}  // namespace recast
