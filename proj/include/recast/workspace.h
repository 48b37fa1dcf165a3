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


#ifndef RECAST_WORKSPACE_H_
#define RECAST_WORKSPACE_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "recast/frame.h"
#include "recast/hash.h"

namespace recast {

// Character replacement works at these sizes unless configured otherwise.
inline constexpr int kDefaultReferenceWidth = 1024;
inline constexpr int kDefaultReferenceHeight = 768;
inline constexpr int kDefaultSceneWidth = 1024;
inline constexpr int kDefaultSceneHeight = 2048;

// `frame_000042.png`
std::string frame_filename(std::size_t index);

// Loads `frame_%06d.png` files starting at index 0. Throws EmptyError when
// there are none, GapError on a missing index, DimensionError when shapes
// differ. Never modifies the directory.
FrameSequence ingest_frames(const std::filesystem::path& dir,
                            Rational expected_fps = {});

// Writes every frame as `frame_%06d.png` into `dir`, creating it.
void write_sequence(const std::filesystem::path& dir, const FrameSequence& seq);

// Runs an external decoder. `command_template` must contain `{in}` and
// `{out}`; both are substituted shell-quoted. Throws ConfigError for a bad
// template and DecoderError on non-zero exit. Returns `out_dir`.
std::filesystem::path decode_video(const std::string& command_template,
                                   const std::filesystem::path& video_path,
                                   const std::filesystem::path& out_dir);

struct SequenceInfo {
  std::size_t frames = 0;
  int width = 0;
  int height = 0;
  int channels = 0;
  Rational fps;
  ArtifactId id;
};

struct WorkspaceManifest {
  std::filesystem::path root;
  std::map<std::string, SequenceInfo> sequences;
  std::string created_at;
};

// A directory holding `manifest.json`, `seq/<name>/frame_%06d.png` and
// `cache/<ArtifactId>/...`. Frames are immutable once written. Manifest
// updates take an advisory lock on `<root>/.lock`.
class Workspace {
 public:
  // Creates the directory layout when missing.
  static Workspace open(const std::filesystem::path& root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path sequence_dir(const std::string& name) const;
  std::filesystem::path frame_path(const std::string& name,
                                   std::size_t index) const;
  std::filesystem::path cache_dir() const { return root_ / "cache"; }
  // Resolves a workspace-relative path; absolute paths and `..` escapes are
  // rejected with ConfigError.
  std::filesystem::path resolve(const std::string& relative) const;

  WorkspaceManifest manifest() const;
  std::optional<SequenceInfo> find_sequence(const std::string& name) const;

  FrameSequence ingest(const std::string& name,
                       const std::filesystem::path& dir,
                       Rational expected_fps = {});
  void store_sequence(const std::string& name, const FrameSequence& seq);
  // Throws NotFoundError for unknown names.
  FrameSequence load_sequence(const std::string& name) const;

  // Checks every manifest entry against the files on disk; throws
  // DimensionError / GapError / NotFoundError on the first mismatch.
  void verify() const;

 private:
  explicit Workspace(std::filesystem::path root) : root_(std::move(root)) {}

  std::filesystem::path root_;
};

bool is_valid_sequence_name(const std::string& name);

}  // namespace recast

#endif  // RECAST_WORKSPACE_H_
