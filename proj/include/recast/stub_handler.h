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


#ifndef RECAST_STUB_HANDLER_H_
#define RECAST_STUB_HANDLER_H_

// Worker-side message handling for the deterministic stubs. The same handler
// backs the in-process builtin transport and the standalone recast_worker
// binary (stdio or HTTP), so all three speak byte-identical protocol.

#include <filesystem>
#include <optional>
#include <string>

#include "recast/protocol.h"
#include "recast/workspace.h"

namespace recast {

// Deliberate protocol violations, used to exercise the engine's checks.
enum class Fault {
  kNone,
  kBadVersion,       // handshake advertises protocol_version 2
  kUnknownStage,     // handshake advertises a stage the engine does not know
  kWrongLength,      // outputs carry one item too many
  kOutOfBand,        // inpaint writes outside its mask; other stages change dims
  kBadGrid,          // harmonize grid with non-finite coefficients
  kMissingArtifact,  // response names a path that does not exist
  kWrongId,          // response request_id differs from the request
  kMalformed,        // response is not JSON
  kError,            // well-formed error response
  kHang,             // never answers
  kCrash,            // exits mid-request
};

// ConfigError for unknown names. Names are the dashed forms, e.g.
// "wrong-length".
Fault parse_fault(const std::string& name);

struct StubOptions {
  // "stub" serves every stage; "identity" serves harmonize_params only and
  // always answers with identity grids.
  std::string personality = "stub";
  Fault fault = Fault::kNone;
  // When set, request faults only fire for this stage.
  std::string fault_stage;
  int max_batch = 0;
};

class StubHandler {
 public:
  explicit StubHandler(StubOptions options = {});

  // Processes one incoming line and returns the reply line, or nullopt for
  // messages that take no reply (shutdown). Sets `*shutdown` on shutdown.
  std::optional<std::string> on_message(const std::string& line,
                                        bool* shutdown = nullptr);

  // Fixes the workspace without a hello message (builtin transport).
  void attach(const std::filesystem::path& workspace_root);

 private:
  Json ready() const;
  StageResponse invoke(const StageRequest& req);
  std::map<std::string, std::string> run_stage(const StageRequest& req,
                                               bool faulty);
  bool fault_applies(const std::string& stage) const;

  StubOptions options_;
  std::optional<Workspace> workspace_;
};

}  // namespace recast

#endif  // RECAST_STUB_HANDLER_H_
