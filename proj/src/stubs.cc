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


#include "recast/stubs.h"

#include <algorithm>
#include <cmath>
#include <deque>

#include "recast/color.h"
#include "recast/error.h"
#include "recast/morphology.h"

namespace recast {

namespace {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

Point2 midpoint(const Keypoint& a, const Keypoint& b) {
  return {(a.x + b.x) / 2.0, (a.y + b.y) / 2.0};
}

Keypoint lerp_keypoint(const Keypoint& a, const Keypoint& b, double t) {
  return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y),
          std::min(a.confidence, b.confidence)};
}

void check_same_shape(const FrameSequence& frames, const MaskSequence& masks,
                      const char* what) {
  if (frames.size() != masks.size()) {
    throw LengthError(std::string(what) + ": " + std::to_string(frames.size()) +
                      " frames but " + std::to_string(masks.size()) + " masks");
  }
  if (frames.width() != masks.width() || frames.height() != masks.height()) {
    throw DimensionError(std::string(what) + ": frame and mask sizes differ");
  }
}

// Straight-alpha RGBA sample scaled to [0, 1] alpha with premultiplied colour.
struct Premultiplied {
  double r = 0.0, g = 0.0, b = 0.0, a = 0.0;
};

Premultiplied texel(const Frame& image, int x, int y) {
  if (x < 0 || y < 0 || x >= image.width() || y >= image.height()) return {};
  const std::uint8_t* p = image.pixel(x, y);
  const double a = p[3] / 255.0;
  return {p[0] * a, p[1] * a, p[2] * a, a};
}

Premultiplied sample_bilinear(const Frame& image, double u, double v) {
  const double fx0 = std::floor(u);
  const double fy0 = std::floor(v);
  const int x0 = static_cast<int>(fx0);
  const int y0 = static_cast<int>(fy0);
  const double tx = u - fx0;
  const double ty = v - fy0;
  Premultiplied out;
  const double weights[4] = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty,
                             tx * ty};
  const int dx[4] = {0, 1, 0, 1};
  const int dy[4] = {0, 0, 1, 1};
  for (int k = 0; k < 4; ++k) {
    if (weights[k] == 0.0) continue;
    const Premultiplied t = texel(image, x0 + dx[k], y0 + dy[k]);
    out.r += weights[k] * t.r;
    out.g += weights[k] * t.g;
    out.b += weights[k] * t.b;
    out.a += weights[k] * t.a;
  }
  return out;
}

std::uint8_t round_code(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

}  // namespace

Mask flood_fill(const Frame& frame, int seed_x, int seed_y, double tau) {
  if (seed_x < 0 || seed_y < 0 || seed_x >= frame.width() ||
      seed_y >= frame.height()) {
    throw PromptError("seed (" + std::to_string(seed_x) + ", " +
                      std::to_string(seed_y) + ") lies outside the frame");
  }
  if (!(tau >= 0.0)) throw ParamError("colour threshold must be non-negative");
  const double tau2 = tau * tau;
  const std::uint8_t* seed = frame.pixel(seed_x, seed_y);
  const int sr = seed[0], sg = seed[1], sb = seed[2];
  auto accept = [&](int x, int y) {
    const std::uint8_t* p = frame.pixel(x, y);
    const double dr = p[0] - sr, dg = p[1] - sg, db = p[2] - sb;
    return dr * dr + dg * dg + db * db <= tau2;
  };

  Mask mask(frame.width(), frame.height());
  std::deque<std::pair<int, int>> queue;
  mask.set(seed_x, seed_y);
  queue.emplace_back(seed_x, seed_y);
  constexpr int kDx[4] = {1, -1, 0, 0};
  constexpr int kDy[4] = {0, 0, 1, -1};
  while (!queue.empty()) {
    const auto [x, y] = queue.front();
    queue.pop_front();
    for (int k = 0; k < 4; ++k) {
      const int nx = x + kDx[k];
      const int ny = y + kDy[k];
      if (nx < 0 || ny < 0 || nx >= frame.width() || ny >= frame.height()) continue;
      if (mask.get(nx, ny) || !accept(nx, ny)) continue;
      mask.set(nx, ny);
      queue.emplace_back(nx, ny);
    }
  }
  return mask;
}

std::optional<std::pair<int, int>> mask_centroid(const Mask& mask) {
  double sx = 0.0, sy = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.get(x, y)) continue;
      sx += x;
      sy += y;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return std::pair{static_cast<int>(std::floor(sx / n + 0.5)),
                   static_cast<int>(std::floor(sy / n + 0.5))};
}

MaskSequence stub_segment_track(const FrameSequence& frames,
                                const Prompt& prompt, double tau) {
  prompt.validate(frames.width(), frames.height(), frames.size());
  const auto [sx, sy] = prompt.seed();
  const std::size_t k = prompt.frame_index;
  std::vector<Mask> masks(frames.size());
  masks[k] = flood_fill(frames[k], sx, sy, tau);

  auto track_from = [&](std::size_t from, std::size_t to) {
    const auto c = mask_centroid(masks[from]);
    masks[to] = c ? flood_fill(frames[to], c->first, c->second, tau)
                  : Mask(frames.width(), frames.height());
  };
  for (std::size_t j = k + 1; j < frames.size(); ++j) track_from(j - 1, j);
  for (std::size_t j = k; j-- > 0;) track_from(j + 1, j);
  return MaskSequence(std::move(masks));
}

Frame stub_inpaint_frame(const Frame& frame, const Mask& mask, int iters) {
  if (mask.width() != frame.width() || mask.height() != frame.height()) {
    throw DimensionError("inpaint: frame and mask sizes differ");
  }
  if (iters < 0) throw ParamError("inpaint iteration count must be non-negative");
  const std::size_t masked = mask.count();
  if (masked == 0) return frame;
  if (masked == mask.size()) {
    throw UninpaintableError("mask covers the entire frame; nothing to inpaint from");
  }

  const int w = frame.width();
  const int h = frame.height();
  LinearImage values = to_linear(frame);

  const Mask ring = edge_band(mask, 1, 0);
  LinearColor mean;
  std::size_t ring_count = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!ring.get(x, y)) continue;
      const LinearColor& c = values.at(x, y);
      mean.r += c.r;
      mean.g += c.g;
      mean.b += c.b;
      ++ring_count;
    }
  }
  for (int c = 0; c < 3; ++c) mean[c] /= static_cast<double>(ring_count);

  std::vector<std::pair<int, int>> holes;
  holes.reserve(masked);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask.get(x, y)) {
        holes.emplace_back(x, y);
        values.at(x, y) = mean;
      }
    }
  }

  constexpr int kDx[4] = {1, -1, 0, 0};
  constexpr int kDy[4] = {0, 0, 1, -1};
  std::vector<LinearColor> next(holes.size());
  for (int it = 0; it < iters; ++it) {
    for (std::size_t i = 0; i < holes.size(); ++i) {
      const auto [x, y] = holes[i];
      LinearColor sum;
      int n = 0;
      for (int k = 0; k < 4; ++k) {
        const int nx = x + kDx[k];
        const int ny = y + kDy[k];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const LinearColor& c = values.at(nx, ny);
        sum.r += c.r;
        sum.g += c.g;
        sum.b += c.b;
        ++n;
      }
      next[i] = {sum.r / n, sum.g / n, sum.b / n};
    }
    for (std::size_t i = 0; i < holes.size(); ++i) {
      values.at(holes[i].first, holes[i].second) = next[i];
    }
  }

  Frame out = frame;
  for (const auto& [x, y] : holes) {
    std::uint8_t* p = out.pixel(x, y);
    const LinearColor& c = values.at(x, y);
    p[0] = linear_to_srgb(c.r);
    p[1] = linear_to_srgb(c.g);
    p[2] = linear_to_srgb(c.b);
  }
  return out;
}

FrameSequence stub_inpaint(const FrameSequence& frames,
                           const MaskSequence& masks, int iters) {
  check_same_shape(frames, masks, "inpaint");
  std::vector<Frame> out;
  out.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    out.push_back(stub_inpaint_frame(frames[i], masks[i], iters));
  }
  return FrameSequence(std::move(out), frames.fps());
}

// Subject faces the camera, so its left side sits at larger x.
KeypointSet pose_from_bbox(const std::optional<BBox>& box) {
  KeypointSet set{};
  if (!box) return set;
  const double cx = (box->x_min + box->x_max) / 2.0;
  const double y0 = box->y_min;
  const double bw = box->x_max - box->x_min;
  const double bh = box->y_max - box->y_min;
  auto at = [](double x, double y) { return Keypoint{x, y, 1.0}; };

  set[kNose] = at(cx, y0 + 0.08 * bh);
  set[kLeftShoulder] = at(cx + 0.2 * bw, y0 + 0.2 * bh);
  set[kRightShoulder] = at(cx - 0.2 * bw, y0 + 0.2 * bh);
  set[kLeftHip] = at(cx + 0.12 * bw, y0 + 0.55 * bh);
  set[kRightHip] = at(cx - 0.12 * bw, y0 + 0.55 * bh);
  set[kLeftAnkle] = at(cx + 0.12 * bw, static_cast<double>(box->y_max));
  set[kRightAnkle] = at(cx - 0.12 * bw, static_cast<double>(box->y_max));

  set[kLeftEye] = lerp_keypoint(set[kNose], set[kLeftShoulder], 0.15);
  set[kRightEye] = lerp_keypoint(set[kNose], set[kRightShoulder], 0.15);
  set[kLeftEar] = lerp_keypoint(set[kNose], set[kLeftShoulder], 0.3);
  set[kRightEar] = lerp_keypoint(set[kNose], set[kRightShoulder], 0.3);
  set[kLeftElbow] = lerp_keypoint(set[kLeftShoulder], set[kLeftHip], 0.5);
  set[kRightElbow] = lerp_keypoint(set[kRightShoulder], set[kRightHip], 0.5);
  set[kLeftWrist] = lerp_keypoint(set[kLeftShoulder], set[kLeftHip], 0.9);
  set[kRightWrist] = lerp_keypoint(set[kRightShoulder], set[kRightHip], 0.9);
  set[kLeftKnee] = lerp_keypoint(set[kLeftHip], set[kLeftAnkle], 0.5);
  set[kRightKnee] = lerp_keypoint(set[kRightHip], set[kRightAnkle], 0.5);
  return set;
}

PoseSequence stub_pose(const MaskSequence& masks) {
  PoseSequence poses;
  poses.width = masks.width();
  poses.height = masks.height();
  poses.frames.reserve(masks.size());
  for (const Mask& m : masks.masks()) {
    poses.frames.push_back(pose_from_bbox(mask_bbox(m)));
  }
  return poses;
}

FrameSequence stub_animate(const ReferenceCharacter& ref,
                           const PoseSequence& poses, int scene_width,
                           int scene_height) {
  if (ref.image.channels() != 4) {
    throw ParamError("reference character must be RGBA");
  }
  if (poses.frames.empty()) throw EmptyError("no poses to animate");
  KeypointSet anchor;
  if (ref.anchor) {
    anchor = *ref.anchor;
  } else {
    Mask matte(ref.image.width(), ref.image.height());
    for (int y = 0; y < ref.image.height(); ++y) {
      for (int x = 0; x < ref.image.width(); ++x) {
        if (ref.image.pixel(x, y)[3] >= kMaskThreshold) matte.set(x, y);
      }
    }
    const auto box = mask_bbox(matte);
    if (!box) throw ParamError("reference character has an empty matte");
    anchor = pose_from_bbox(box);
  }
  const Point2 ref_hip = midpoint(anchor[kLeftHip], anchor[kRightHip]);
  const Point2 ref_sh = midpoint(anchor[kLeftShoulder], anchor[kRightShoulder]);
  const double rx = ref_sh.x - ref_hip.x;
  const double ry = ref_sh.y - ref_hip.y;
  const double r2 = rx * rx + ry * ry;
  if (r2 == 0.0) throw DegeneratePoseError("reference torso segment has zero length");

  std::vector<Frame> out;
  out.reserve(poses.frames.size());
  for (std::size_t f = 0; f < poses.frames.size(); ++f) {
    const KeypointSet& pose = poses.frames[f];
    Frame canvas(scene_width, scene_height, 4);
    const bool confident = pose[kLeftHip].confidence > 0 &&
                           pose[kRightHip].confidence > 0 &&
                           pose[kLeftShoulder].confidence > 0 &&
                           pose[kRightShoulder].confidence > 0;
    if (is_absent(pose) || !confident) {
      out.push_back(std::move(canvas));
      continue;
    }
    const Point2 hip = midpoint(pose[kLeftHip], pose[kRightHip]);
    const Point2 sh = midpoint(pose[kLeftShoulder], pose[kRightShoulder]);
    const double tx = sh.x - hip.x;
    const double ty = sh.y - hip.y;
    if (tx == 0.0 && ty == 0.0) {
      throw DegeneratePoseError("pose " + std::to_string(f) +
                                " has a zero-length torso segment");
    }
    // z = t * conj(r) / |r|^2 maps reference offsets onto target offsets;
    // its inverse is conj(z) / |z|^2.
    const double zr = (tx * rx + ty * ry) / r2;
    const double zi = (ty * rx - tx * ry) / r2;
    const double z2 = zr * zr + zi * zi;
    const double ir = zr / z2;
    const double ii = -zi / z2;
    for (int y = 0; y < scene_height; ++y) {
      for (int x = 0; x < scene_width; ++x) {
        const double ox = x - hip.x;
        const double oy = y - hip.y;
        const double u = ref_hip.x + (ox * ir - oy * ii);
        const double v = ref_hip.y + (ox * ii + oy * ir);
        const Premultiplied s = sample_bilinear(ref.image, u, v);
        const std::uint8_t alpha = round_code(s.a * 255.0);
        if (alpha == 0) continue;
        std::uint8_t* p = canvas.pixel(x, y);
        p[0] = round_code(s.r / s.a);
        p[1] = round_code(s.g / s.a);
        p[2] = round_code(s.b / s.a);
        p[3] = alpha;
      }
    }
    out.push_back(std::move(canvas));
  }
  return FrameSequence(std::move(out));
}

HarmonizeStats harmonize_stats(const FrameSequence& composite,
                               const MaskSequence& masks,
                               const BlockRange& range, int ring_width) {
  check_same_shape(composite, masks, "harmonize_params");
  if (range.end > composite.size() || range.start >= range.end) {
    throw ParamError("block range outside the sequence");
  }
  if (ring_width < 1) throw ParamError("ring width must be at least 1");

  std::vector<LinearColor> fg;
  std::vector<LinearColor> ring;
  for (std::size_t j = range.start; j < range.end; ++j) {
    const Mask& m = masks[j];
    if (m.empty()) continue;
    const Mask around = edge_band(m, ring_width, 0);
    const Frame& frame = composite[j];
    for (int y = 0; y < frame.height(); ++y) {
      for (int x = 0; x < frame.width(); ++x) {
        const bool in_fg = m.get(x, y);
        if (!in_fg && !around.get(x, y)) continue;
        const std::uint8_t* p = frame.pixel(x, y);
        const LinearColor c{srgb_to_linear(p[0]), srgb_to_linear(p[1]),
                            srgb_to_linear(p[2])};
        (in_fg ? fg : ring).push_back(c);
      }
    }
  }

  auto moments = [](const std::vector<LinearColor>& px, LinearColor& mean,
                    LinearColor& stddev) {
    mean = {};
    stddev = {};
    if (px.empty()) return;
    for (const auto& c : px) {
      for (int k = 0; k < 3; ++k) mean[k] += c[k];
    }
    for (int k = 0; k < 3; ++k) mean[k] /= static_cast<double>(px.size());
    for (const auto& c : px) {
      for (int k = 0; k < 3; ++k) stddev[k] += (c[k] - mean[k]) * (c[k] - mean[k]);
    }
    for (int k = 0; k < 3; ++k) {
      stddev[k] = std::sqrt(stddev[k] / static_cast<double>(px.size()));
    }
  };

  HarmonizeStats stats;
  stats.fg_count = fg.size();
  stats.ring_count = ring.size();
  moments(fg, stats.fg_mean, stats.fg_std);
  moments(ring, stats.ring_mean, stats.ring_std);
  return stats;
}

ColorTransformGrid stub_harmonize_params(const FrameSequence& composite,
                                         const MaskSequence& masks,
                                         const BlockRange& range,
                                         int ring_width, int stride,
                                         bool* fell_back) {
  const HarmonizeStats s = harmonize_stats(composite, masks, range, ring_width);
  if (fell_back != nullptr) *fell_back = false;
  if (s.fg_count == 0 || s.ring_count == 0) {
    if (fell_back != nullptr) *fell_back = true;
    return ColorTransformGrid::covering(composite.width(), composite.height(),
                                        stride);
  }
  LinearColor gain;
  LinearColor bias;
  for (int c = 0; c < 3; ++c) {
    gain[c] = s.ring_std[c] / std::max(s.fg_std[c], kHarmonizeEpsilon);
    bias[c] = s.ring_mean[c] - gain[c] * s.fg_mean[c];
  }
  return ColorTransformGrid::covering(composite.width(), composite.height(),
                                      stride, AffineColor::gain_bias(gain, bias));
}

}  // namespace recast
