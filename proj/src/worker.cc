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


#include "recast/worker.h"

#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "recast/edge_refine.h"
#include "recast/error.h"
#include "recast/png_io.h"
#include "recast/process.h"
#include "recast/stub_handler.h"

namespace recast {

namespace fs = std::filesystem;

namespace {

std::chrono::milliseconds timeout_of(const WorkerSpec& spec) {
  return std::chrono::milliseconds(
      static_cast<std::int64_t>(std::ceil(spec.timeout_seconds * 1000.0)));
}

class SubprocessChannel : public Channel {
 public:
  SubprocessChannel(const WorkerSpec& spec, const Workspace& workspace)
      : timeout_(timeout_of(spec)), proc_(spec.command, workspace.root()) {}

  ~SubprocessChannel() override { shutdown(); }

  std::string exchange(const std::string& message) override {
    if (!proc_.running()) throw ProtocolError("worker process has exited");
    if (!proc_.write_line(message)) {
      proc_.terminate();
      throw ProtocolError("worker closed its input");
    }
    std::optional<std::string> line;
    try {
      line = proc_.read_line(std::chrono::steady_clock::now() + timeout_);
    } catch (const IoError&) {
      const int status = proc_.terminate();
      throw ProtocolError("worker exited with status " + std::to_string(status) +
                          " before replying");
    }
    if (!line) {
      proc_.terminate();
      throw TimeoutError("worker did not reply within " +
                         std::to_string(timeout_.count()) + " ms");
    }
    return *line;
  }

  void shutdown() noexcept override {
    if (!proc_.running()) return;
    try {
      proc_.write_line(shutdown_message().dump());
      proc_.close_stdin();
    } catch (...) {
    }
    proc_.terminate(std::chrono::milliseconds(2000));
  }

 private:
  std::chrono::milliseconds timeout_;
  Subprocess proc_;
};

class HttpChannel : public Channel {
 public:
  explicit HttpChannel(const WorkerSpec& spec) : client_(spec.url) {
    const auto timeout = timeout_of(spec);
    client_.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(
                                       timeout).count() + 1);
    client_.set_read_timeout(timeout);
    client_.set_write_timeout(timeout);
  }

  std::string exchange(const std::string& message) override {
    const Json msg = parse_message(message);
    const char* route = msg.contains("hello") ? "/hello" : "/invoke";
    auto res = client_.Post(route, message, "application/json");
    if (!res) {
      const auto err = res.error();
      if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) {
        throw TimeoutError("http worker timed out: " + httplib::to_string(err));
      }
      throw ProtocolError("http worker unreachable: " + httplib::to_string(err));
    }
    if (res->status != 200) {
      throw ProtocolError("http worker answered status " +
                          std::to_string(res->status));
    }
    return res->body;
  }

  void shutdown() noexcept override {
    try {
      client_.Post("/shutdown", shutdown_message().dump(), "application/json");
    } catch (...) {
    }
  }

 private:
  httplib::Client client_;
};

class BuiltinChannel : public Channel {
 public:
  explicit BuiltinChannel(const WorkerSpec& spec)
      : handler_(StubOptions{spec.builtin, Fault::kNone, "", spec.max_batch}) {}

  std::string exchange(const std::string& message) override {
    auto reply = handler_.on_message(message);
    if (!reply) throw ProtocolError("builtin worker sent no reply");
    return *reply;
  }

  void shutdown() noexcept override {}

 private:
  StubHandler handler_;
};

// Request-scoped directory under work/; removed when the call finishes.
class Scratch {
 public:
  Scratch(const Workspace& ws, const std::string& request_id)
      : rel_("work/" + request_id), path_(ws.resolve(rel_)) {
    fs::create_directories(path_ / "in");
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  Scratch(const Scratch&) = delete;
  Scratch& operator=(const Scratch&) = delete;

  std::string rel(const std::string& sub) const { return rel_ + "/in/" + sub; }
  fs::path path(const std::string& sub) const { return path_ / "in" / sub; }

 private:
  std::string rel_;
  fs::path path_;
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot read '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out.flush()) throw IoError("cannot write '" + path.string() + "'");
}

[[noreturn]] void violation(std::string_view stage, const std::string& what) {
  throw ContractViolationError(std::string(stage) + ": " + what);
}

// Loads a returned artifact; any failure to parse it is the worker's fault.
template <typename F>
auto load_output(std::string_view stage, F&& load) -> decltype(load()) {
  try {
    return load();
  } catch (const ContractViolationError&) {
    throw;
  } catch (const Error& e) {
    violation(stage, std::string("unusable output (") + e.kind() + "): " + e.what());
  }
}

const std::string& output_path(const StageResponse& resp, std::string_view stage,
                               const std::string& name) {
  const auto it = resp.artifacts.find(name);
  if (it == resp.artifacts.end()) {
    violation(stage, "response lacks the '" + name + "' artifact");
  }
  return it->second;
}

MaskSequence slice(const MaskSequence& masks, std::size_t start, std::size_t end) {
  return MaskSequence(std::vector<Mask>(masks.masks().begin() + start,
                                        masks.masks().begin() + end));
}

FrameSequence slice(const FrameSequence& frames, std::size_t start,
                    std::size_t end) {
  return FrameSequence(std::vector<Frame>(frames.frames().begin() + start,
                                          frames.frames().begin() + end),
                       frames.fps());
}

void check_pair(const FrameSequence& frames, const MaskSequence& masks) {
  if (frames.size() != masks.size()) {
    throw LengthError(std::to_string(frames.size()) + " frames but " +
                      std::to_string(masks.size()) + " masks");
  }
  if (frames.width() != masks.width() || frames.height() != masks.height()) {
    throw DimensionError("frame and mask sizes differ");
  }
}

}  // namespace

std::unique_ptr<Channel> open_channel(const WorkerSpec& spec,
                                      const Workspace& workspace) {
  spec.validate();
  switch (spec.transport) {
    case Transport::kSubprocess:
      return std::make_unique<SubprocessChannel>(spec, workspace);
    case Transport::kHttp:
      return std::make_unique<HttpChannel>(spec);
    case Transport::kBuiltin:
      return std::make_unique<BuiltinChannel>(spec);
  }
  throw ConfigError("unknown transport");
}

WorkerClient::WorkerClient(WorkerSpec spec, Workspace workspace)
    : spec_(std::move(spec)), workspace_(std::move(workspace)) {
  spec_.validate();
}

WorkerClient::~WorkerClient() { shutdown(); }

void WorkerClient::shutdown() noexcept {
  std::lock_guard lock(mu_);
  if (channel_) channel_->shutdown();
  channel_.reset();
  ready_.reset();
}

ReadyMessage WorkerClient::handshake() {
  std::lock_guard lock(mu_);
  return handshake_locked();
}

ReadyMessage WorkerClient::handshake_locked() {
  if (ready_) return *ready_;
  channel_ = open_channel(spec_, workspace_);
  try {
    const std::string reply =
        channel_->exchange(hello_message(workspace_.root().string()).dump());
    ready_ = ready_from_json(parse_message(reply));
  } catch (...) {
    channel_->shutdown();
    channel_.reset();
    throw;
  }
  return *ready_;
}

int WorkerClient::max_batch() {
  const int advertised = handshake().max_batch;
  if (spec_.max_batch > 0 && advertised > 0) {
    return std::min(spec_.max_batch, advertised);
  }
  return spec_.max_batch > 0 ? spec_.max_batch : advertised;
}

std::string WorkerClient::next_request_id(std::string_view stage) {
  static std::atomic<std::uint64_t> counter{0};
  return std::string(stage) + "-" + std::to_string(::getpid()) + "-" +
         std::to_string(++counter);
}

StageResponse WorkerClient::invoke(StageRequest req) {
  if (req.request_id.empty()) req.request_id = next_request_id(req.stage);
  std::lock_guard lock(mu_);
  const ReadyMessage ready = handshake_locked();
  if (std::find(ready.stages.begin(), ready.stages.end(), req.stage) ==
      ready.stages.end()) {
    throw ConfigError("worker does not serve stage '" + req.stage + "'");
  }
  std::string reply;
  try {
    reply = channel_->exchange(request_to_json(req).dump());
  } catch (...) {
    // The connection state is unknown; reconnect on the next request.
    channel_->shutdown();
    channel_.reset();
    ready_.reset();
    throw;
  }
  const StageResponse resp = response_from_json(parse_message(reply));
  if (resp.request_id != req.request_id) {
    throw ProtocolError("response request_id '" + resp.request_id +
                        "' does not match request '" + req.request_id + "'");
  }
  if (!resp.ok) throw StageError(req.stage, resp.error_code, resp.error_message);
  for (const auto& [name, rel] : resp.artifacts) {
    fs::path path;
    try {
      path = workspace_.resolve(rel);
    } catch (const ConfigError& e) {
      violation(req.stage, e.what());
    }
    if (!fs::exists(path)) {
      violation(req.stage, "artifact '" + name + "' does not exist at '" + rel + "'");
    }
  }
  return resp;
}

MaskSequence call_segment_track(WorkerClient& worker,
                                const FrameSequence& frames,
                                const Prompt& prompt, double tau) {
  prompt.validate(frames.width(), frames.height(), frames.size());
  StageRequest req;
  req.stage = kSegmentTrack;
  req.request_id = worker.next_request_id(req.stage);
  Scratch scratch(worker.workspace(), req.request_id);
  write_sequence(scratch.path("frames"), frames);
  req.artifacts = {{"frames", scratch.rel("frames")}};
  req.params = {{"prompt", prompt_to_json(prompt)}, {"tau", tau}};

  const StageResponse resp = worker.invoke(req);
  const fs::path path = worker.workspace().resolve(output_path(resp, req.stage, "masks"));
  MaskSequence masks = load_output(req.stage, [&] { return read_mask_sequence(path); });
  if (masks.size() != frames.size()) {
    violation(req.stage, "returned " + std::to_string(masks.size()) +
                             " masks for " + std::to_string(frames.size()) +
                             " frames");
  }
  if (masks.width() != frames.width() || masks.height() != frames.height()) {
    violation(req.stage, "mask size does not match the frames");
  }
  return masks;
}

FrameSequence call_inpaint(WorkerClient& worker, const FrameSequence& frames,
                           const MaskSequence& masks, int iters) {
  check_pair(frames, masks);
  const int batch = worker.max_batch();
  const std::size_t step = batch > 0 ? static_cast<std::size_t>(batch) : frames.size();
  std::vector<Frame> out;
  out.reserve(frames.size());
  for (std::size_t start = 0; start < frames.size(); start += step) {
    const std::size_t end = std::min(frames.size(), start + step);
    const FrameSequence chunk = slice(frames, start, end);
    const MaskSequence chunk_masks = slice(masks, start, end);
    StageRequest req;
    req.stage = kInpaint;
    req.request_id = worker.next_request_id(req.stage);
    Scratch scratch(worker.workspace(), req.request_id);
    write_sequence(scratch.path("frames"), chunk);
    write_mask_sequence(scratch.path("masks.json"), chunk_masks);
    req.artifacts = {{"frames", scratch.rel("frames")},
                     {"masks", scratch.rel("masks.json")}};
    req.params = {{"iters", iters}};

    const StageResponse resp = worker.invoke(req);
    const fs::path dir =
        worker.workspace().resolve(output_path(resp, req.stage, "frames"));
    const FrameSequence result =
        load_output(req.stage, [&] { return ingest_frames(dir, frames.fps()); });
    const FrameSequence merged = merge_inpaint_result(chunk, chunk_masks, result);
    out.insert(out.end(), merged.frames().begin(), merged.frames().end());
  }
  return FrameSequence(std::move(out), frames.fps());
}

PoseSequence call_pose_estimate(WorkerClient& worker,
                                const FrameSequence& frames,
                                const MaskSequence& masks) {
  check_pair(frames, masks);
  StageRequest req;
  req.stage = kPoseEstimate;
  req.request_id = worker.next_request_id(req.stage);
  Scratch scratch(worker.workspace(), req.request_id);
  write_sequence(scratch.path("frames"), frames);
  write_mask_sequence(scratch.path("masks.json"), masks);
  req.artifacts = {{"frames", scratch.rel("frames")},
                   {"masks", scratch.rel("masks.json")}};

  const StageResponse resp = worker.invoke(req);
  const fs::path path = worker.workspace().resolve(output_path(resp, req.stage, "poses"));
  PoseSequence poses =
      load_output(req.stage, [&] { return pose_sequence_from_json(read_text(path)); });
  if (poses.frames.size() != frames.size()) {
    violation(req.stage, "returned " + std::to_string(poses.frames.size()) +
                             " poses for " + std::to_string(frames.size()) +
                             " frames");
  }
  if (poses.width != frames.width() || poses.height != frames.height()) {
    violation(req.stage, "pose dims do not match the frames");
  }
  load_output(req.stage, [&] {
    poses.validate();
    return 0;
  });
  return poses;
}

FrameSequence call_animate(WorkerClient& worker, const ReferenceCharacter& ref,
                           const PoseSequence& poses, int width, int height) {
  if (poses.frames.empty()) throw EmptyError("no poses to animate");
  StageRequest req;
  req.stage = kAnimate;
  req.request_id = worker.next_request_id(req.stage);
  Scratch scratch(worker.workspace(), req.request_id);
  write_png(scratch.path("reference.png"), ref.image);
  write_text(scratch.path("poses.json"), pose_sequence_to_json(poses));
  req.artifacts = {{"reference", scratch.rel("reference.png")},
                   {"poses", scratch.rel("poses.json")}};
  req.params = {{"width", width}, {"height", height}};
  if (ref.anchor) req.params["anchor"] = keypoint_set_to_json(*ref.anchor);

  const StageResponse resp = worker.invoke(req);
  const fs::path dir = worker.workspace().resolve(output_path(resp, req.stage, "frames"));
  FrameSequence out = load_output(req.stage, [&] { return ingest_frames(dir); });
  if (out.size() != poses.frames.size()) {
    violation(req.stage, "returned " + std::to_string(out.size()) +
                             " frames for " + std::to_string(poses.frames.size()) +
                             " poses");
  }
  if (out.width() != width || out.height() != height || out.channels() != 4) {
    violation(req.stage, "frames must be " + std::to_string(width) + "x" +
                             std::to_string(height) + " RGBA");
  }
  return out;
}

std::vector<ColorTransformGrid> call_harmonize_params(
    WorkerClient& worker, const FrameSequence& composite,
    const MaskSequence& masks, std::size_t block_index, const BlockRange& range,
    int stride, int ring_width) {
  check_pair(composite, masks);
  if (range.start >= range.end || range.end > composite.size()) {
    throw ParamError("block range outside the sequence");
  }
  StageRequest req;
  req.stage = kHarmonizeParams;
  req.request_id = worker.next_request_id(req.stage);
  Scratch scratch(worker.workspace(), req.request_id);
  write_sequence(scratch.path("frames"), slice(composite, range.start, range.end));
  write_mask_sequence(scratch.path("masks.json"), slice(masks, range.start, range.end));
  req.artifacts = {{"frames", scratch.rel("frames")},
                   {"masks", scratch.rel("masks.json")}};
  req.params = {{"block_index", block_index},
                {"start", 0},
                {"end", range.size()},
                {"stride", stride},
                {"ring_width", ring_width}};

  const StageResponse resp = worker.invoke(req);
  const fs::path path = worker.workspace().resolve(output_path(resp, req.stage, "grids"));
  HarmonizeResult result = load_output(
      req.stage, [&] { return harmonize_result_from_json(read_text(path)); });
  const std::size_t expected = result.per_frame ? range.size() : 1;
  if (result.grids.size() != expected) {
    violation(req.stage, "returned " + std::to_string(result.grids.size()) +
                             " grids, expected " + std::to_string(expected));
  }
  for (const auto& grid : result.grids) {
    if (!grid.covers(composite.width(), composite.height())) {
      violation(req.stage, "grid does not cover the frame");
    }
    for (const auto& cell : grid.cells()) {
      if (!cell.is_finite()) violation(req.stage, "grid has non-finite coefficients");
    }
  }
  if (!result.per_frame) result.grids.assign(range.size(), result.grids.front());
  return result.grids;
}

}  // namespace recast
