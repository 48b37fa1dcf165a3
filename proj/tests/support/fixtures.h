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


#ifndef RECAST_TESTS_SUPPORT_FIXTURES_H_
#define RECAST_TESTS_SUPPORT_FIXTURES_H_

// Synthetic clips and throwaway workspaces shared by the unit tests and the
// acceptance runner.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "recast/frame.h"
#include "recast/mask.h"
#include "recast/pipeline.h"
#include "recast/workspace.h"

namespace recast::testing {

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Scene geometry for the moving-square clip.
inline constexpr int kClipWidth = 128;
inline constexpr int kClipHeight = 128;
inline constexpr std::size_t kClipFrames = 16;
inline constexpr int kSquareW = 36;
inline constexpr int kSquareH = 56;
inline constexpr int kSquareX0 = 40;
inline constexpr int kSquareY0 = 36;

// Deterministic low-amplitude texture in greys and greens.
void paint_background(Frame& frame);
// Left edge of the square in frame `i`; it moves one pixel per frame.
int square_x(std::size_t i);

struct Clip {
  FrameSequence frames;
  MaskSequence truth;
};

// Pure red rectangle over the textured background.
Clip moving_square_clip(std::size_t n_frames = kClipFrames,
                        int width = kClipWidth, int height = kClipHeight);

// 64x96 RGBA image: an opaque blue rectangle on a transparent canvas.
Frame blue_reference();

// Prompt clicking the centre of the square on frame 0.
Prompt square_prompt();

// Ingests the clip as "scene", writes the reference to `reference.png` and
// returns a config using builtin stub workers.
PipelineConfig setup_fixture_workspace(const Workspace& ws);

Mask random_mask(std::mt19937& rng, int width, int height, double density);

// Finds the cached output of `stage` in a workspace that ran a single plan.
std::optional<FrameSequence> cached_frames(const Workspace& ws,
                                           const std::string& stage);

// Paths of the binaries built alongside the tests.
std::string worker_bin();
std::string cli_bin();

// Lines of a JSON-lines file.
std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace recast::testing

#endif  // RECAST_TESTS_SUPPORT_FIXTURES_H_
