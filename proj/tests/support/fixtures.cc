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


#include "support/fixtures.h"

#include <atomic>
#include <fstream>

#include <unistd.h>

#include "recast/png_io.h"
#include "recast/protocol.h"

namespace recast::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("recast-test-" + std::to_string(::getpid()) + "-" +
           std::to_string(++counter));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void paint_background(Frame& frame) {
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      std::uint8_t* p = frame.pixel(x, y);
      p[0] = static_cast<std::uint8_t>(90 + (7 * x + 3 * y) % 17);
      p[1] = static_cast<std::uint8_t>(120 + (5 * x + 11 * y) % 23);
      p[2] = static_cast<std::uint8_t>(90 + (3 * x + 7 * y) % 13);
    }
  }
}

int square_x(std::size_t i) { return kSquareX0 + static_cast<int>(i); }

Clip moving_square_clip(std::size_t n_frames, int width, int height) {
  std::vector<Frame> frames;
  std::vector<Mask> masks;
  for (std::size_t i = 0; i < n_frames; ++i) {
    Frame f(width, height, 3);
    paint_background(f);
    Mask m(width, height);
    for (int y = kSquareY0; y < kSquareY0 + kSquareH && y < height; ++y) {
      for (int x = square_x(i); x < square_x(i) + kSquareW && x < width; ++x) {
        std::uint8_t* p = f.pixel(x, y);
        p[0] = 255;
        p[1] = 0;
        p[2] = 0;
        m.set(x, y);
      }
    }
    frames.push_back(std::move(f));
    masks.push_back(std::move(m));
  }
  return {FrameSequence(std::move(frames)), MaskSequence(std::move(masks))};
}

Frame blue_reference() {
  Frame ref(64, 96, 4);
  for (int y = 8; y <= 87; ++y) {
    for (int x = 16; x <= 47; ++x) {
      std::uint8_t* p = ref.pixel(x, y);
      p[0] = 0;
      p[1] = 0;
      p[2] = 255;
      p[3] = 255;
    }
  }
  return ref;
}

Prompt square_prompt() {
  Prompt p;
  p.frame_index = 0;
  p.kind = PromptKind::kPoint;
  p.points.push_back({square_x(0) + kSquareW / 2, kSquareY0 + kSquareH / 2, true});
  return p;
}

PipelineConfig setup_fixture_workspace(const Workspace& ws) {
  Workspace mutable_ws = ws;
  mutable_ws.store_sequence("scene", moving_square_clip().frames);
  write_png(ws.root() / "reference.png", blue_reference());
  PipelineConfig config;
  config.scene = "scene";
  config.prompt = square_prompt();
  config.tau = 30.0;
  config.reference = "reference.png";
  config.workers["default"] = WorkerSpec{};
  config.output = "result";
  return config;
}

Mask random_mask(std::mt19937& rng, int width, int height, double density) {
  std::bernoulli_distribution bit(density);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(width) * height);
  for (auto& b : bits) b = bit(rng) ? 1 : 0;
  return Mask(width, height, std::move(bits));
}

std::optional<FrameSequence> cached_frames(const Workspace& ws,
                                           const std::string& stage) {
  if (!fs::exists(ws.cache_dir())) return std::nullopt;
  for (const auto& dir : fs::directory_iterator(ws.cache_dir())) {
    const fs::path entry_path = dir.path() / "entry.json";
    if (!fs::exists(entry_path)) continue;
    std::ifstream in(entry_path);
    const Json entry = Json::parse(in);
    if (entry.at("stage") == stage && entry.at("kind") == "frames") {
      return ingest_frames(dir.path() / "frames");
    }
  }
  return std::nullopt;
}

std::string worker_bin() { return RECAST_WORKER_BIN; }
std::string cli_bin() { return RECAST_CLI_BIN; }

std::vector<std::string> read_lines(const fs::path& path) {
  std::vector<std::string> lines;
  std::ifstream in(path);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace recast::testing
