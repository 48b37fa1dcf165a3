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


#ifndef RECAST_PIPELINE_H_
#define RECAST_PIPELINE_H_

// The stage graph: segment -> remove on one branch, pose -> animate on the
// other, joined by composite -> harmonize -> edge_refine. Every node's output
// is cached under a key derived from its stage, parameters and input ids.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "recast/edge_refine.h"
#include "recast/hash.h"
#include "recast/pose.h"
#include "recast/prompt.h"
#include "recast/protocol.h"
#include "recast/workspace.h"

namespace recast {

inline constexpr std::string_view kEngineVersion = "recast-1.0.0";

// Node names.
inline constexpr std::string_view kNodeSegment = "segment_track";
inline constexpr std::string_view kNodeRemove = "remove";
inline constexpr std::string_view kNodePose = "pose_estimate";
inline constexpr std::string_view kNodeAnimate = "animate";
inline constexpr std::string_view kNodeComposite = "composite";
inline constexpr std::string_view kNodeHarmonize = "harmonize";
inline constexpr std::string_view kNodeEdgeRefine = "edge_refine";

struct HarmonizeSettings {
  std::size_t block_len = 16;
  std::size_t overlap = 4;
  int stride = 8;
  int ring_width = 4;
};

struct PipelineConfig {
  std::string scene;
  Prompt prompt;
  double tau = 30.0;
  // RGBA PNG; relative paths resolve against the workspace root.
  std::string reference;
  std::optional<KeypointSet> reference_anchor;
  // Keyed by protocol stage name; "default" covers stages not listed.
  std::map<std::string, WorkerSpec> workers;
  EdgeBandConfig edge;
  bool edge_refine_enabled = true;
  HarmonizeSettings harmonize;
  bool removal_enabled = true;
  int inpaint_iters = 200;
  std::string output = "result";

  // ConfigError on invalid values or a stage without a worker.
  void validate() const;
  // Worker for a protocol stage, falling back to "default".
  const WorkerSpec& worker_for(std::string_view stage) const;
};

PipelineConfig config_from_json(const Json& j);
Json config_to_json(const PipelineConfig& config);
// ConfigError when the file is missing or not valid JSON.
PipelineConfig load_config(const std::filesystem::path& path);

struct PlanNode {
  std::string name;
  // Canonical parameters; part of the cache key.
  Json params = Json::object();
  ArtifactId params_digest;
  std::vector<std::string> deps;
  // Protocol stage whose worker this node calls, empty for local nodes.
  std::string worker_stage;
  WorkerSpec worker;
};

struct StagePlan {
  std::vector<PlanNode> nodes;
  std::string scene;
  ArtifactId scene_id;
  std::filesystem::path reference_path;
  ArtifactId reference_id;
  std::optional<KeypointSet> reference_anchor;
  std::string output;

  // (dependency, dependent) pairs.
  std::vector<std::pair<std::string, std::string>> edges() const;
  const PlanNode& node(std::string_view name) const;
  bool has_node(std::string_view name) const;
  // ConfigError for duplicate names, unknown dependencies or cycles.
  void validate() const;
  // Kahn order, ties broken by declaration order.
  std::vector<std::string> topological_order() const;
};

// ConfigError when the config is invalid, the scene is not ingested, or the
// reference is missing or lacks an alpha channel.
StagePlan plan(const PipelineConfig& config, const Workspace& workspace);

// SHA-256 over length-prefixed (stage, params, sorted input ids, engine
// version).
ArtifactId cache_key(std::string_view stage, std::string_view params,
                     std::vector<ArtifactId> inputs,
                     std::string_view engine_version = kEngineVersion);

struct RunOptions {
  // Re-executes cache hits and compares their output ids.
  bool verify_cache = false;
  std::size_t max_parallel = 2;
  std::function<void(const std::string& node)> on_node_start;
  // Called once the node's output is committed to the cache.
  std::function<void(const std::string& node, bool cache_hit)> on_node_done;
};

struct RunReport {
  ArtifactId final_id;
  std::vector<std::string> executed;
  std::vector<std::string> cache_hits;
  std::vector<std::string> verify_mismatches;
  std::string failed_node;
};

// Executes the plan and stores the final frames as the sequence named
// `plan.output`. The first node failure stops new work, waits for running
// nodes and is rethrown; completed nodes stay cached. The run log goes to
// <root>/logs/<output>.jsonl.
ArtifactId run(const StagePlan& plan, const Workspace& workspace,
               const RunOptions& options = {}, RunReport* report = nullptr);

std::filesystem::path run_log_path(const Workspace& workspace,
                                   const std::string& output);

}  // namespace recast

#endif  // RECAST_PIPELINE_H_
