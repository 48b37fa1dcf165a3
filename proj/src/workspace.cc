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


#include "recast/workspace.h"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <regex>
#include <set>

#include <json.hpp>

#include "recast/error.h"
#include "recast/png_io.h"
#include "recast/process.h"

namespace recast {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class ScopedFileLock {
 public:
  explicit ScopedFileLock(const fs::path& path) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw IoError("cannot open lock file '" + path.string() + "'");
    while (::flock(fd_, LOCK_EX) != 0) {
      if (errno != EINTR) {
        ::close(fd_);
        throw IoError("cannot lock '" + path.string() + "'");
      }
    }
  }
  ~ScopedFileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  ScopedFileLock(const ScopedFileLock&) = delete;
  ScopedFileLock& operator=(const ScopedFileLock&) = delete;

 private:
  int fd_ = -1;
};

std::string utc_now() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  ::gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json to_json(const WorkspaceManifest& m) {
  json seqs = json::object();
  for (const auto& [name, info] : m.sequences) {
    seqs[name] = {{"frames", info.frames},
                  {"width", info.width},
                  {"height", info.height},
                  {"channels", info.channels},
                  {"fps", info.fps.str()},
                  {"id", info.id.hex()}};
  }
  return {{"created_at", m.created_at}, {"sequences", seqs}};
}

WorkspaceManifest manifest_from_json(const json& j, const fs::path& root) {
  WorkspaceManifest m;
  m.root = root;
  m.created_at = j.value("created_at", "");
  for (const auto& [name, s] : j.at("sequences").items()) {
    SequenceInfo info;
    info.frames = s.at("frames").get<std::size_t>();
    info.width = s.at("width").get<int>();
    info.height = s.at("height").get<int>();
    info.channels = s.at("channels").get<int>();
    info.fps = Rational::parse(s.at("fps").get<std::string>());
    info.id = ArtifactId::from_hex(s.at("id").get<std::string>());
    m.sequences.emplace(name, info);
  }
  return m;
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out.flush()) throw IoError("cannot write '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

WorkspaceManifest read_manifest(const fs::path& root) {
  std::ifstream in(root / "manifest.json");
  if (!in) throw IoError("cannot read manifest in '" + root.string() + "'");
  try {
    return manifest_from_json(json::parse(in), root);
  } catch (const json::exception& e) {
    throw IoError("corrupt manifest in '" + root.string() + "': " + e.what());
  }
}

void write_manifest(const WorkspaceManifest& m) {
  write_text_atomic(m.root / "manifest.json", to_json(m).dump(2) + "\n");
}

}  // namespace

std::string frame_filename(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06zu.png", index);
  return buf;
}

FrameSequence ingest_frames(const fs::path& dir, Rational expected_fps) {
  if (!fs::is_directory(dir)) {
    throw NotFoundError("frame directory '" + dir.string() + "' does not exist");
  }
  static const std::regex kPattern(R"(frame_(\d{6})\.png)");
  std::set<std::size_t> indices;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch match;
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && std::regex_match(name, match, kPattern)) {
      indices.insert(std::stoul(match[1].str()));
    }
  }
  if (indices.empty()) {
    throw EmptyError("no frame_%06d.png files in '" + dir.string() + "'");
  }
  std::size_t expected = 0;
  for (std::size_t index : indices) {
    if (index != expected) {
      throw GapError("missing " + frame_filename(expected) + " in '" +
                     dir.string() + "'");
    }
    ++expected;
  }
  std::vector<Frame> frames;
  frames.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    frames.push_back(read_png(dir / frame_filename(i)));
  }
  return FrameSequence(std::move(frames), expected_fps);
}

void write_sequence(const fs::path& dir, const FrameSequence& seq) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    write_png(dir / frame_filename(i), seq[i]);
  }
}

fs::path decode_video(const std::string& command_template,
                      const fs::path& video_path, const fs::path& out_dir) {
  const auto in_pos = command_template.find("{in}");
  const auto out_pos = command_template.find("{out}");
  if (in_pos == std::string::npos || out_pos == std::string::npos) {
    throw ConfigError("decoder template must contain {in} and {out}: '" +
                      command_template + "'");
  }
  std::string command;
  for (std::size_t i = 0; i < command_template.size();) {
    if (command_template.compare(i, 4, "{in}") == 0) {
      command += shell_quote(video_path.string());
      i += 4;
    } else if (command_template.compare(i, 5, "{out}") == 0) {
      command += shell_quote(out_dir.string());
      i += 5;
    } else {
      command += command_template[i++];
    }
  }
  fs::create_directories(out_dir);
  const CommandResult result = run_shell(command);
  if (result.exit_code != 0) {
    throw DecoderError(result.exit_code, result.output);
  }
  return out_dir;
}

bool is_valid_sequence_name(const std::string& name) {
  static const std::regex kName(R"([A-Za-z0-9_][A-Za-z0-9_.-]*)");
  return name.size() <= 128 && std::regex_match(name, kName);
}

Workspace Workspace::open(const fs::path& root) {
  fs::create_directories(root / "seq");
  fs::create_directories(root / "cache");
  Workspace ws(fs::absolute(root).lexically_normal());
  ScopedFileLock lock(ws.root_ / ".lock");
  if (!fs::exists(ws.root_ / "manifest.json")) {
    WorkspaceManifest m;
    m.root = ws.root_;
    m.created_at = utc_now();
    write_manifest(m);
  }
  return ws;
}

fs::path Workspace::sequence_dir(const std::string& name) const {
  if (!is_valid_sequence_name(name)) {
    throw ConfigError("invalid sequence name '" + name + "'");
  }
  return root_ / "seq" / name;
}

fs::path Workspace::frame_path(const std::string& name,
                               std::size_t index) const {
  return sequence_dir(name) / frame_filename(index);
}

fs::path Workspace::resolve(const std::string& relative) const {
  const fs::path rel = fs::path(relative).lexically_normal();
  if (relative.empty() || rel.is_absolute() || *rel.begin() == "..") {
    throw ConfigError("path must stay inside the workspace: '" + relative + "'");
  }
  return root_ / rel;
}

WorkspaceManifest Workspace::manifest() const { return read_manifest(root_); }

std::optional<SequenceInfo> Workspace::find_sequence(
    const std::string& name) const {
  const auto m = manifest();
  const auto it = m.sequences.find(name);
  if (it == m.sequences.end()) return std::nullopt;
  return it->second;
}

FrameSequence Workspace::ingest(const std::string& name, const fs::path& dir,
                                Rational expected_fps) {
  FrameSequence seq = ingest_frames(dir, expected_fps);
  store_sequence(name, seq);
  return seq;
}

void Workspace::store_sequence(const std::string& name,
                               const FrameSequence& seq) {
  const fs::path target = sequence_dir(name);
  ScopedFileLock lock(root_ / ".lock");
  const fs::path staging = root_ / "seq" / ("." + name + ".staging");
  const fs::path retired = root_ / "seq" / ("." + name + ".retired");
  fs::remove_all(staging);
  fs::remove_all(retired);
  write_sequence(staging, seq);
  if (fs::exists(target)) fs::rename(target, retired);
  fs::rename(staging, target);
  fs::remove_all(retired);

  WorkspaceManifest m = read_manifest(root_);
  SequenceInfo info;
  info.frames = seq.size();
  info.width = seq.width();
  info.height = seq.height();
  info.channels = seq.channels();
  info.fps = seq.fps();
  info.id = seq.id();
  m.sequences[name] = info;
  write_manifest(m);
}

FrameSequence Workspace::load_sequence(const std::string& name) const {
  const auto info = find_sequence(name);
  if (!info) throw NotFoundError("unknown sequence '" + name + "'");
  return ingest_frames(sequence_dir(name), info->fps);
}

void Workspace::verify() const {
  for (const auto& [name, info] : manifest().sequences) {
    const FrameSequence seq = ingest_frames(sequence_dir(name), info.fps);
    if (seq.size() != info.frames) {
      throw GapError("sequence '" + name + "' has " +
                     std::to_string(seq.size()) + " frames, manifest says " +
                     std::to_string(info.frames));
    }
    if (seq.width() != info.width || seq.height() != info.height ||
        seq.channels() != info.channels) {
      throw DimensionError("sequence '" + name +
                           "' does not match its manifest dimensions");
    }
  }
}

}  // namespace recast
