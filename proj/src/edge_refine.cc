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


#include "recast/edge_refine.h"

#include <algorithm>
#include <cmath>
#include <optional>

#include "recast/error.h"
#include "recast/morphology.h"

namespace recast {

void EdgeBandConfig::validate() const {
  if (r_out < 1) throw ConfigError("edge band r_out must be at least 1");
  if (r_in < 0) throw ConfigError("edge band r_in must be non-negative");
  if (scale_reference_width < 1) {
    throw ConfigError("edge band reference width must be positive");
  }
}

std::pair<int, int> scaled_radii(const EdgeBandConfig& cfg, int frame_width) {
  cfg.validate();
  const double scale =
      static_cast<double>(frame_width) / cfg.scale_reference_width;
  const int r_out = std::max(1, static_cast<int>(std::lround(cfg.r_out * scale)));
  int r_in = static_cast<int>(std::lround(cfg.r_in * scale));
  if (cfg.r_in > 0) r_in = std::max(1, r_in);
  return {r_out, r_in};
}

MaskSequence edge_band_sequence(const MaskSequence& masks,
                                const EdgeBandConfig& cfg) {
  const auto [r_out, r_in] = scaled_radii(cfg, masks.width());
  std::vector<Mask> bands;
  bands.reserve(masks.size());
  for (const Mask& m : masks.masks()) {
    bands.push_back(m.empty() ? Mask(m.width(), m.height())
                              : edge_band(m, r_out, r_in));
  }
  return MaskSequence(std::move(bands));
}

FrameSequence merge_inpaint_result(const FrameSequence& input,
                                   const MaskSequence& masks,
                                   const FrameSequence& result) {
  if (result.size() != input.size()) {
    throw ContractViolationError("inpaint returned " +
                                 std::to_string(result.size()) +
                                 " frames for a " +
                                 std::to_string(input.size()) + "-frame request");
  }
  if (!result[0].same_shape(input[0])) {
    throw ContractViolationError("inpaint returned frames of a different shape");
  }
  std::vector<Frame> out;
  out.reserve(input.size());
  const int ch = input.channels();
  for (std::size_t i = 0; i < input.size(); ++i) {
    Frame merged = input[i];
    for (int y = 0; y < input.height(); ++y) {
      for (int x = 0; x < input.width(); ++x) {
        const std::uint8_t* r = result[i].pixel(x, y);
        if (masks[i].get(x, y)) {
          std::copy(r, r + ch, merged.pixel(x, y));
        } else if (!std::equal(r, r + ch, input[i].pixel(x, y))) {
          throw ContractViolationError(
              "inpaint changed pixel (" + std::to_string(x) + ", " +
              std::to_string(y) + ") of frame " + std::to_string(i) +
              " outside its mask");
        }
      }
    }
    out.push_back(std::move(merged));
  }
  return FrameSequence(std::move(out), input.fps());
}

FrameSequence refine_edges(const FrameSequence& frames,
                           const MaskSequence& bands, const InpaintFn& worker) {
  if (frames.size() != bands.size()) {
    throw LengthError("refine_edges: " + std::to_string(frames.size()) +
                      " frames but " + std::to_string(bands.size()) + " bands");
  }
  if (frames.width() != bands.width() || frames.height() != bands.height()) {
    throw DimensionError("refine_edges: frame and band sizes differ");
  }
  const bool any = std::any_of(bands.masks().begin(), bands.masks().end(),
                               [](const Mask& m) { return !m.empty(); });
  if (!any) return frames;

  std::optional<FrameSequence> result;
  try {
    result.emplace(worker(frames, bands));
  } catch (const ContractViolationError&) {
    throw;
  } catch (const ProtocolError&) {
    throw;
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError("edge_refine", e.kind(), e.what());
  }
  return merge_inpaint_result(frames, bands, *result);
}

}  // namespace recast
