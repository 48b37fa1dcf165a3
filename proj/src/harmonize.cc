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


#include "recast/harmonize.h"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "recast/error.h"

namespace recast {

using nlohmann::json;

namespace {

// Exact when a == b, so uniform grids lift without rounding drift.
double lerp_exact(double a, double b, double t) {
  if (a == b) return a;
  return a + t * (b - a);
}

}  // namespace

AffineColor AffineColor::identity() {
  AffineColor a;
  a.at(0, 0) = 1.0;
  a.at(1, 1) = 1.0;
  a.at(2, 2) = 1.0;
  return a;
}

AffineColor AffineColor::gain_bias(const LinearColor& gain,
                                   const LinearColor& bias) {
  AffineColor a;
  for (int c = 0; c < 3; ++c) {
    a.at(c, c) = gain[c];
    a.at(c, 3) = bias[c];
  }
  return a;
}

bool AffineColor::is_finite() const {
  for (double v : m) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

LinearColor AffineColor::apply(const LinearColor& in) const {
  LinearColor out;
  for (int c = 0; c < 3; ++c) {
    out[c] = at(c, 0) * in.r + at(c, 1) * in.g + at(c, 2) * in.b + at(c, 3);
  }
  return out;
}

AffineColor compose(const AffineColor& outer, const AffineColor& inner) {
  AffineColor out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) {
      double v = c == 3 ? outer.at(r, 3) : 0.0;
      for (int k = 0; k < 3; ++k) v += outer.at(r, k) * inner.at(k, c);
      out.at(r, c) = v;
    }
  }
  return out;
}

AffineColor blend_params(const AffineColor& a, const AffineColor& b, double t) {
  AffineColor out;
  for (std::size_t i = 0; i < out.m.size(); ++i) {
    out.m[i] = a.m[i] == b.m[i] ? a.m[i] : (1.0 - t) * a.m[i] + t * b.m[i];
  }
  return out;
}

ColorTransformGrid::ColorTransformGrid(int grid_w, int grid_h, int stride,
                                       AffineColor fill)
    : grid_w_(grid_w), grid_h_(grid_h), stride_(stride) {
  if (grid_w < 1 || grid_h < 1 || stride < 1) {
    throw ParamError("transform grid needs positive size and stride");
  }
  cells_.assign(static_cast<std::size_t>(grid_w) * grid_h, fill);
}

ColorTransformGrid ColorTransformGrid::covering(int width, int height,
                                                int stride, AffineColor fill) {
  if (stride < 1) throw ParamError("grid stride must be positive");
  return ColorTransformGrid((width + stride - 1) / stride,
                            (height + stride - 1) / stride, stride, fill);
}

bool ColorTransformGrid::covers(int width, int height) const {
  return grid_w_ == (width + stride_ - 1) / stride_ &&
         grid_h_ == (height + stride_ - 1) / stride_;
}

ColorTransformGrid blend_params(const ColorTransformGrid& a,
                                const ColorTransformGrid& b, double t) {
  if (a.grid_w() != b.grid_w() || a.grid_h() != b.grid_h() ||
      a.stride() != b.stride()) {
    throw ParamError("cannot blend transform grids of different shapes");
  }
  ColorTransformGrid out = a;
  for (int j = 0; j < a.grid_h(); ++j) {
    for (int i = 0; i < a.grid_w(); ++i) {
      out.cell(i, j) = blend_params(a.cell(i, j), b.cell(i, j), t);
    }
  }
  return out;
}

std::string grid_to_json(const ColorTransformGrid& grid) {
  json rows = json::array();
  for (int j = 0; j < grid.grid_h(); ++j) {
    json row = json::array();
    for (int i = 0; i < grid.grid_w(); ++i) {
      const AffineColor& a = grid.cell(i, j);
      json mat = json::array();
      for (int r = 0; r < 3; ++r) {
        mat.push_back({a.at(r, 0), a.at(r, 1), a.at(r, 2), a.at(r, 3)});
      }
      row.push_back(std::move(mat));
    }
    rows.push_back(std::move(row));
  }
  return json{{"stride", grid.stride()}, {"grid", rows}}.dump();
}

ColorTransformGrid grid_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    const int stride = doc.at("stride").get<int>();
    const json& rows = doc.at("grid");
    if (!rows.is_array() || rows.empty() || !rows[0].is_array() ||
        rows[0].empty()) {
      throw ProtocolError("transform grid must be a non-empty [h][w] array");
    }
    const int gh = static_cast<int>(rows.size());
    const int gw = static_cast<int>(rows[0].size());
    ColorTransformGrid grid(gw, gh, stride, AffineColor::identity());
    for (int j = 0; j < gh; ++j) {
      if (rows[j].size() != static_cast<std::size_t>(gw)) {
        throw ProtocolError("ragged transform grid");
      }
      for (int i = 0; i < gw; ++i) {
        const json& mat = rows[j][i];
        if (mat.size() != 3) throw ProtocolError("grid cell must be 3x4");
        AffineColor& a = grid.cell(i, j);
        for (int r = 0; r < 3; ++r) {
          if (mat[r].size() != 4) throw ProtocolError("grid cell must be 3x4");
          for (int c = 0; c < 4; ++c) {
            if (!mat[r][c].is_number()) {
              throw ParamError("non-numeric transform coefficient");
            }
            a.at(r, c) = mat[r][c].get<double>();
          }
        }
      }
    }
    return grid;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed transform grid: ") + e.what());
  }
}

ParamField upsample_grid(const ColorTransformGrid& grid, int width,
                         int height) {
  ParamField field{width, height, {}};
  field.params.resize(static_cast<std::size_t>(width) * height);
  const double stride = grid.stride();
  for (int y = 0; y < height; ++y) {
    const double v = y / stride - 0.5;
    const int j0f = static_cast<int>(std::floor(v));
    const double ty = v - j0f;
    const int j0 = std::clamp(j0f, 0, grid.grid_h() - 1);
    const int j1 = std::clamp(j0f + 1, 0, grid.grid_h() - 1);
    for (int x = 0; x < width; ++x) {
      const double u = x / stride - 0.5;
      const int i0f = static_cast<int>(std::floor(u));
      const double tx = u - i0f;
      const int i0 = std::clamp(i0f, 0, grid.grid_w() - 1);
      const int i1 = std::clamp(i0f + 1, 0, grid.grid_w() - 1);
      const AffineColor& c00 = grid.cell(i0, j0);
      const AffineColor& c10 = grid.cell(i1, j0);
      const AffineColor& c01 = grid.cell(i0, j1);
      const AffineColor& c11 = grid.cell(i1, j1);
      AffineColor& out = field.params[static_cast<std::size_t>(y) * width + x];
      for (std::size_t k = 0; k < out.m.size(); ++k) {
        const double top = lerp_exact(c00.m[k], c10.m[k], tx);
        const double bottom = lerp_exact(c01.m[k], c11.m[k], tx);
        out.m[k] = lerp_exact(top, bottom, ty);
      }
    }
  }
  return field;
}

Frame apply_pct(const Frame& frame, const ParamField& field, const Mask& mask) {
  if (field.width != frame.width() || field.height != frame.height() ||
      mask.width() != frame.width() || mask.height() != frame.height()) {
    throw DimensionError("apply_pct: frame, field and mask sizes differ");
  }
  for (const AffineColor& a : field.params) {
    if (!a.is_finite()) throw ParamError("non-finite colour transform parameter");
  }
  Frame out = frame;
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      if (!mask.get(x, y)) continue;
      std::uint8_t* p = out.pixel(x, y);
      const LinearColor in{srgb_to_linear(p[0]), srgb_to_linear(p[1]),
                           srgb_to_linear(p[2])};
      const LinearColor res = field.at(x, y).apply(in);
      for (int c = 0; c < 3; ++c) {
        p[c] = linear_to_srgb(std::clamp(res[c], 0.0, 1.0));
      }
    }
  }
  return out;
}

BlockSchedule partition_blocks(std::size_t n_frames, std::size_t block_len,
                               std::size_t overlap) {
  if (n_frames < 1) throw ConfigError("cannot partition an empty sequence");
  if (block_len < 1) throw ConfigError("block length must be at least 1");
  if (2 * overlap > block_len) {
    throw ConfigError("block overlap (" + std::to_string(overlap) +
                      ") must be at most half the block length (" +
                      std::to_string(block_len) + ")");
  }
  BlockSchedule schedule;
  schedule.block_len = block_len;
  schedule.overlap = overlap;
  const std::size_t step = block_len - overlap;
  for (std::size_t start = 0;; start += step) {
    const std::size_t end = std::min(start + block_len, n_frames);
    schedule.entries.push_back({start, end});
    if (end == n_frames) break;
  }
  return schedule;
}

std::vector<ColorTransformGrid> resolve_frame_params(
    const BlockSchedule& schedule,
    const std::vector<std::vector<ColorTransformGrid>>& block_params) {
  const auto& blocks = schedule.entries;
  if (blocks.empty() || block_params.size() != blocks.size()) {
    throw ParamError("one parameter set per block is required");
  }
  auto grid_for = [&](std::size_t b, std::size_t frame) -> const ColorTransformGrid& {
    const auto& params = block_params[b];
    return params.size() == 1 ? params.front() : params[frame - blocks[b].start];
  };
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto n = block_params[b].size();
    if (n != 1 && n != blocks[b].size()) {
      throw ContractViolationError(
          "block " + std::to_string(b) + " returned " + std::to_string(n) +
          " grids; expected 1 or " + std::to_string(blocks[b].size()));
    }
  }

  const std::size_t n_frames = blocks.back().end;
  std::vector<ColorTransformGrid> out;
  out.reserve(n_frames);
  std::size_t first = 0;  // first block containing the current frame
  for (std::size_t j = 0; j < n_frames; ++j) {
    while (blocks[first].end <= j) ++first;
    const bool shared = first + 1 < blocks.size() && blocks[first + 1].start <= j;
    if (!shared) {
      out.push_back(grid_for(first, j));
      continue;
    }
    if (first + 2 < blocks.size() && blocks[first + 2].start <= j) {
      throw ConfigError("frame " + std::to_string(j) +
                        " lies in more than two blocks; overlap must not "
                        "exceed half the block length");
    }
    const std::size_t next_start = blocks[first + 1].start;
    const std::size_t w = blocks[first].end - next_start;
    const double t = static_cast<double>(j - next_start + 1) /
                     static_cast<double>(w + 1);
    out.push_back(blend_params(grid_for(first, j), grid_for(first + 1, j), t));
  }
  return out;
}

FrameSequence harmonize_sequence(const FrameSequence& frames,
                                 const MaskSequence& masks,
                                 const ParamsProvider& provider,
                                 const BlockSchedule& schedule) {
  if (frames.size() != masks.size()) {
    throw LengthError("harmonize: " + std::to_string(frames.size()) +
                      " frames but " + std::to_string(masks.size()) + " masks");
  }
  if (frames.width() != masks.width() || frames.height() != masks.height()) {
    throw DimensionError("harmonize: frame and mask sizes differ");
  }
  if (schedule.entries.empty() || schedule.entries.front().start != 0 ||
      schedule.entries.back().end != frames.size()) {
    throw ConfigError("block schedule does not cover the sequence");
  }

  std::vector<std::vector<ColorTransformGrid>> block_params;
  block_params.reserve(schedule.entries.size());
  for (std::size_t b = 0; b < schedule.entries.size(); ++b) {
    const int block = static_cast<int>(b);
    try {
      auto grids = provider(b, schedule.entries[b]);
      for (const auto& g : grids) {
        if (!g.covers(frames.width(), frames.height())) {
          throw ContractViolationError(
              "block " + std::to_string(b) + " grid is " +
              std::to_string(g.grid_w()) + "x" + std::to_string(g.grid_h()) +
              " at stride " + std::to_string(g.stride()) +
              ", which does not cover the frame");
        }
      }
      block_params.push_back(std::move(grids));
    } catch (const ContractViolationError&) {
      throw;
    } catch (const ProtocolError&) {
      throw;
    } catch (const StageError& e) {
      throw StageError("harmonize", e.code(), e.what(), block);
    } catch (const Error& e) {
      throw StageError("harmonize", e.kind(), e.what(), block);
    }
  }

  const auto per_frame = resolve_frame_params(schedule, block_params);
  std::vector<Frame> out;
  out.reserve(frames.size());
  for (std::size_t j = 0; j < frames.size(); ++j) {
    const ParamField field =
        upsample_grid(per_frame[j], frames.width(), frames.height());
    out.push_back(apply_pct(frames[j], field, masks[j]));
  }
  return FrameSequence(std::move(out), frames.fps());
}

}  // namespace recast
