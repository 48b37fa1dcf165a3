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


#ifndef RECAST_WORKER_H_
#define RECAST_WORKER_H_

// Engine side of the worker protocol: transports, the handshake and typed
// stage calls that check every response against its request before any
// output is accepted.

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "recast/frame.h"
#include "recast/harmonize.h"
#include "recast/mask.h"
#include "recast/pose.h"
#include "recast/prompt.h"
#include "recast/protocol.h"
#include "recast/workspace.h"

namespace recast {

// One message exchange with a worker. Implementations throw TimeoutError when
// the worker does not answer in time and ProtocolError when the connection
// breaks.
class Channel {
 public:
  virtual ~Channel() = default;
  // Sends `message` and returns the reply line.
  virtual std::string exchange(const std::string& message) = 0;
  // Best-effort orderly shutdown; never throws.
  virtual void shutdown() noexcept = 0;
};

std::unique_ptr<Channel> open_channel(const WorkerSpec& spec,
                                      const Workspace& workspace);

// A connection to one worker. Requests are serialized: at most one is in
// flight at a time. A broken connection is reopened on the next request.
class WorkerClient {
 public:
  WorkerClient(WorkerSpec spec, Workspace workspace);
  ~WorkerClient();
  WorkerClient(const WorkerClient&) = delete;
  WorkerClient& operator=(const WorkerClient&) = delete;

  // Idempotent. ProtocolError for version mismatch or unknown stages.
  ReadyMessage handshake();

  // Sends one request (assigning a request_id when empty) and validates the
  // envelope: matching request_id, error responses raised as StageError,
  // every returned artifact present in the workspace.
  StageResponse invoke(StageRequest req);

  void shutdown() noexcept;

  const WorkerSpec& spec() const { return spec_; }
  const Workspace& workspace() const { return workspace_; }
  // Frames per request; 0 means unbounded.
  int max_batch();
  std::string next_request_id(std::string_view stage);

 private:
  ReadyMessage handshake_locked();

  WorkerSpec spec_;
  Workspace workspace_;
  std::mutex mu_;
  std::unique_ptr<Channel> channel_;
  std::optional<ReadyMessage> ready_;
};

MaskSequence call_segment_track(WorkerClient& worker,
                                const FrameSequence& frames,
                                const Prompt& prompt, double tau);

// Splits the clip into max_batch-sized requests. Rejects replies that change
// pixels outside the mask.
FrameSequence call_inpaint(WorkerClient& worker, const FrameSequence& frames,
                           const MaskSequence& masks, int iters);

PoseSequence call_pose_estimate(WorkerClient& worker,
                                const FrameSequence& frames,
                                const MaskSequence& masks);

FrameSequence call_animate(WorkerClient& worker, const ReferenceCharacter& ref,
                           const PoseSequence& poses, int width, int height);

// One grid per frame of `range`.
std::vector<ColorTransformGrid> call_harmonize_params(
    WorkerClient& worker, const FrameSequence& composite,
    const MaskSequence& masks, std::size_t block_index, const BlockRange& range,
    int stride, int ring_width);

}  // namespace recast

#endif  // RECAST_WORKER_H_
