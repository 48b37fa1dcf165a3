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


#ifndef RECAST_SERVICE_H_
#define RECAST_SERVICE_H_

// HTTP facade over a workspace: sequence browsing, interactive prompting
// with server-rendered mask previews, and pipeline jobs polled for progress.
//
//   GET  /api/sequences
//   GET  /api/sequences/{name}/frames/{i}      image/png
//   POST /api/prompt                           Prompt JSON (+ "sequence", "tau")
//   GET  /api/masks/{id}/frames/{i}            image/png, white on black
//   POST /api/jobs                             PipelineConfig JSON
//   GET  /api/jobs/{id}                        JobStatus JSON
//   GET  /api/jobs/{id}/result/frames/{i}      image/png

#include <filesystem>
#include <memory>
#include <string>

#include "recast/protocol.h"
#include "recast/workspace.h"

namespace recast {

struct ServiceOptions {
  // Worker behind POST /api/prompt.
  WorkerSpec segment_worker;
  double default_tau = 30.0;
  // Optional directory served at "/" (the operator UI bundle).
  std::filesystem::path static_dir;
};

class Service {
 public:
  explicit Service(Workspace workspace, ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds the listening socket; port 0 picks a free port. Returns the bound
  // port. ConfigError when binding fails.
  int bind(const std::string& host, int port);
  // Serves until stop(). Requires bind().
  void serve();
  // serve() on a background thread.
  void start();
  // Stops serving and waits for running jobs.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace recast

#endif  // RECAST_SERVICE_H_
