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


#include "recast/pipeline.h"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <fstream>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "recast/composite.h"
#include "recast/error.h"
#include "recast/harmonize.h"
#include "recast/png_io.h"
#include "recast/worker.h"

namespace recast {

namespace fs = std::filesystem;

namespace {

constexpr const char* kDefaultWorker = "default";

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

ArtifactId pose_id(const PoseSequence& poses) {
  return artifact_hash(pose_sequence_to_json(poses));
}

// Output of one node; exactly one payload is set.
struct NodeOutput {
  ArtifactId id;
  std::shared_ptr<const FrameSequence> frames;
  std::shared_ptr<const MaskSequence> masks;
  std::shared_ptr<const PoseSequence> poses;
};

NodeOutput frames_output(FrameSequence seq) {
  NodeOutput out;
  out.id = seq.id();
  out.frames = std::make_shared<const FrameSequence>(std::move(seq));
  return out;
}

NodeOutput masks_output(MaskSequence seq) {
  NodeOutput out;
  out.id = seq.id();
  out.masks = std::make_shared<const MaskSequence>(std::move(seq));
  return out;
}

NodeOutput poses_output(PoseSequence poses) {
  NodeOutput out;
  out.id = pose_id(poses);
  out.poses = std::make_shared<const PoseSequence>(std::move(poses));
  return out;
}

// Run log: one JSON object per line, flushed per event so that a killed run
// leaves a complete record of what finished.
class RunLog {
 public:
  explicit RunLog(const fs::path& path) {
    fs::create_directories(path.parent_path());
    out_.open(path, std::ios::app);
    if (!out_) throw IoError("cannot open run log '" + path.string() + "'");
  }

  void event(const char* kind, const std::string& stage, double ms,
             const Json& extra = Json::object()) {
    Json j = extra;
    j["event"] = kind;
    j["stage"] = stage;
    j["ms"] = ms;
    std::lock_guard lock(mu_);
    out_ << j.dump() << '\n';
    out_.flush();
  }

 private:
  std::mutex mu_;
  std::ofstream out_;
};

// One client per protocol stage, created on first use.
class WorkerPool {
 public:
  explicit WorkerPool(const Workspace& workspace) : workspace_(workspace) {}

  WorkerClient& get(const PlanNode& node) {
    std::lock_guard lock(mu_);
    auto& slot = clients_[node.worker_stage];
    if (!slot) slot = std::make_unique<WorkerClient>(node.worker, workspace_);
    return *slot;
  }

 private:
  Workspace workspace_;
  std::mutex mu_;
  std::map<std::string, std::unique_ptr<WorkerClient>> clients_;
};

class Executor {
 public:
  Executor(const StagePlan& plan, const Workspace& workspace,
           const RunOptions& options, RunReport& report)
      : plan_(plan),
        workspace_(workspace),
        options_(options),
        report_(report),
        log_(run_log_path(workspace, plan.output)),
        pool_(workspace) {}

  ArtifactId run();

 private:
  // Returns the output and whether it came from the cache.
  std::pair<NodeOutput, bool> run_node(const PlanNode& node,
                                       const std::map<std::string, NodeOutput>& inputs);
  NodeOutput compute(const PlanNode& node,
                     const std::map<std::string, NodeOutput>& inputs);
  std::vector<ArtifactId> input_ids(const PlanNode& node,
                                    const std::map<std::string, NodeOutput>& inputs);
  std::optional<NodeOutput> load_cached(const fs::path& dir, const ArtifactId& key);
  void commit(const fs::path& dir, const PlanNode& node, const ArtifactId& key,
              const NodeOutput& out);
  std::shared_ptr<const FrameSequence> scene();

  const StagePlan& plan_;
  Workspace workspace_;
  const RunOptions& options_;
  RunReport& report_;
  RunLog log_;
  WorkerPool pool_;
  std::mutex report_mu_;
  std::mutex scene_mu_;
  std::shared_ptr<const FrameSequence> scene_;
};

std::shared_ptr<const FrameSequence> Executor::scene() {
  std::lock_guard lock(scene_mu_);
  if (!scene_) {
    scene_ = std::make_shared<const FrameSequence>(workspace_.load_sequence(plan_.scene));
    if (scene_->id() != plan_.scene_id) {
      throw ConfigError("scene '" + plan_.scene + "' changed since planning");
    }
  }
  return scene_;
}

std::vector<ArtifactId> Executor::input_ids(
    const PlanNode& node, const std::map<std::string, NodeOutput>& inputs) {
  std::vector<ArtifactId> ids;
  for (const auto& dep : node.deps) ids.push_back(inputs.at(dep).id);
  if (node.name == kNodeSegment || node.name == kNodeRemove ||
      node.name == kNodePose ||
      (node.name == kNodeComposite && !plan_.has_node(kNodeRemove))) {
    ids.push_back(plan_.scene_id);
  }
  if (node.name == kNodeAnimate) ids.push_back(plan_.reference_id);
  return ids;
}

std::optional<NodeOutput> Executor::load_cached(const fs::path& dir,
                                                const ArtifactId& key) {
  if (!fs::exists(dir / "entry.json")) return std::nullopt;
  try {
    const Json entry = Json::parse(read_text(dir / "entry.json"));
    if (entry.at("key").get<std::string>() != key.hex() ||
        entry.at("engine_version").get<std::string>() != kEngineVersion) {
      return std::nullopt;
    }
    const std::string kind = entry.at("kind").get<std::string>();
    const ArtifactId expected = ArtifactId::from_hex(entry.at("output_id").get<std::string>());
    NodeOutput out;
    if (kind == "frames") {
      out = frames_output(ingest_frames(
          dir / "frames", Rational::parse(entry.at("fps").get<std::string>())));
    } else if (kind == "masks") {
      out = masks_output(read_mask_sequence(dir / "masks.json"));
    } else if (kind == "poses") {
      out = poses_output(pose_sequence_from_json(read_text(dir / "poses.json")));
    } else {
      return std::nullopt;
    }
    if (out.id != expected) return std::nullopt;
    return out;
  } catch (const Error&) {
    return std::nullopt;
  } catch (const Json::exception&) {
    return std::nullopt;
  }
}

void Executor::commit(const fs::path& dir, const PlanNode& node,
                      const ArtifactId& key, const NodeOutput& out) {
  static std::atomic<std::uint64_t> counter{0};
  const fs::path tmp = workspace_.cache_dir() /
                       (".tmp-" + key.hex() + "-" + std::to_string(::getpid()) +
                        "-" + std::to_string(++counter));
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  Json entry = {{"key", key.hex()},
                {"stage", node.name},
                {"engine_version", kEngineVersion},
                {"output_id", out.id.hex()}};
  if (out.frames) {
    write_sequence(tmp / "frames", *out.frames);
    entry["kind"] = "frames";
    entry["fps"] = out.frames->fps().str();
    entry["outputs"] = {{"frames", "frames"}};
  } else if (out.masks) {
    write_mask_sequence(tmp / "masks.json", *out.masks);
    entry["kind"] = "masks";
    entry["outputs"] = {{"masks", "masks.json"}};
  } else {
    write_text(tmp / "poses.json", pose_sequence_to_json(*out.poses));
    entry["kind"] = "poses";
    entry["outputs"] = {{"poses", "poses.json"}};
  }
  // entry.json is written last: a directory without it is never a hit.
  write_text(tmp / "entry.json", entry.dump(2));
  std::error_code ec;
  fs::remove_all(dir, ec);
  fs::rename(tmp, dir, ec);
  if (ec) fs::remove_all(tmp, ec);
}

std::pair<NodeOutput, bool> Executor::run_node(
    const PlanNode& node, const std::map<std::string, NodeOutput>& inputs) {
  const ArtifactId key = cache_key(node.name, node.params.dump(), input_ids(node, inputs));
  const fs::path dir = workspace_.cache_dir() / key.hex();
  const Json extra = {{"key", key.hex()}};
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed_ms = [&t0] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  if (auto cached = load_cached(dir, key)) {
    log_.event("cache_hit", node.name, elapsed_ms(), extra);
    if (options_.verify_cache) {
      const NodeOutput fresh = compute(node, inputs);
      if (fresh.id != cached->id) {
        std::lock_guard lock(report_mu_);
        report_.verify_mismatches.push_back(node.name);
      }
    }
    return {*cached, true};
  }

  log_.event("stage_start", node.name, 0.0, extra);
  NodeOutput out = compute(node, inputs);
  commit(dir, node, key, out);
  log_.event("stage_done", node.name, elapsed_ms(), extra);
  return {std::move(out), false};
}

NodeOutput Executor::compute(const PlanNode& node,
                             const std::map<std::string, NodeOutput>& inputs) {
  const Json& p = node.params;
  auto frames_of = [&](std::string_view dep) { return inputs.at(std::string(dep)).frames; };

  if (node.name == kNodeSegment) {
    return masks_output(call_segment_track(pool_.get(node), *scene(),
                                           prompt_from_json(p.at("prompt")),
                                           p.at("tau").get<double>()));
  }
  if (node.name == kNodeRemove) {
    return frames_output(call_inpaint(pool_.get(node), *scene(),
                                      *inputs.at(std::string(kNodeSegment)).masks,
                                      p.at("iters").get<int>()));
  }
  if (node.name == kNodePose) {
    return poses_output(call_pose_estimate(pool_.get(node), *scene(),
                                           *inputs.at(std::string(kNodeSegment)).masks));
  }
  if (node.name == kNodeAnimate) {
    ReferenceCharacter ref{read_png(plan_.reference_path), plan_.reference_anchor};
    if (FrameSequence({ref.image}).id() != plan_.reference_id) {
      throw ConfigError("reference image changed since planning");
    }
    return frames_output(call_animate(pool_.get(node), ref,
                                      *inputs.at(std::string(kNodePose)).poses,
                                      p.at("width").get<int>(),
                                      p.at("height").get<int>()));
  }
  if (node.name == kNodeComposite) {
    const auto bg = plan_.has_node(kNodeRemove) ? frames_of(kNodeRemove) : scene();
    const FrameSequence out = composite_sequence(*frames_of(kNodeAnimate), *bg);
    return frames_output(FrameSequence(out.frames(), bg->fps()));
  }
  const auto animate = frames_of(kNodeAnimate);
  const MaskSequence masks = alpha_to_masks(*animate);
  if (node.name == kNodeHarmonize) {
    const auto composite = frames_of(kNodeComposite);
    const BlockSchedule schedule =
        partition_blocks(composite->size(), p.at("block_len").get<std::size_t>(),
                         p.at("overlap").get<std::size_t>());
    const int stride = p.at("stride").get<int>();
    const int ring_width = p.at("ring_width").get<int>();
    WorkerClient& worker = pool_.get(node);
    const ParamsProvider provider = [&](std::size_t b, const BlockRange& range) {
      return call_harmonize_params(worker, *composite, masks, b, range, stride,
                                   ring_width);
    };
    return frames_output(harmonize_sequence(*composite, masks, provider, schedule));
  }
  // edge_refine
  const auto harmonized = frames_of(kNodeHarmonize);
  if (!p.at("enabled").get<bool>()) return frames_output(*harmonized);
  EdgeBandConfig cfg;
  cfg.r_out = p.at("r_out").get<int>();
  cfg.r_in = p.at("r_in").get<int>();
  cfg.scale_reference_width = p.at("scale_reference_width").get<int>();
  const MaskSequence bands = edge_band_sequence(masks, cfg);
  const int iters = p.at("iters").get<int>();
  WorkerClient& worker = pool_.get(node);
  return frames_output(refine_edges(
      *harmonized, bands, [&](const FrameSequence& f, const MaskSequence& m) {
        return call_inpaint(worker, f, m, iters);
      }));
}

ArtifactId Executor::run() {
  const std::vector<std::string> order = plan_.topological_order();
  enum class State { kPending, kRunning, kDone, kFailed };
  std::map<std::string, State> state;
  for (const auto& name : order) state[name] = State::kPending;
  std::map<std::string, NodeOutput> outputs;
  std::exception_ptr failure;
  std::size_t running = 0;
  std::mutex mu;
  std::condition_variable cv;
  std::vector<std::thread> threads;

  auto worker = [&](const PlanNode* node, std::map<std::string, NodeOutput> inputs) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if (options_.on_node_start) options_.on_node_start(node->name);
      auto [out, hit] = run_node(*node, inputs);
      {
        std::lock_guard lock(mu);
        outputs[node->name] = std::move(out);
      }
      {
        std::lock_guard lock(report_mu_);
        (hit ? report_.cache_hits : report_.executed).push_back(node->name);
      }
      if (options_.on_node_done) options_.on_node_done(node->name, hit);
    } catch (...) {
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
              .count();
      std::string what = "unknown error";
      try {
        throw;
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      log_.event("stage_failed", node->name, ms, {{"error", what}});
      std::lock_guard lock(mu);
      state[node->name] = State::kFailed;
      if (!failure) {
        failure = std::current_exception();
        report_.failed_node = node->name;
      }
      --running;
      cv.notify_all();
      return;
    }
    std::lock_guard lock(mu);
    state[node->name] = State::kDone;
    --running;
    cv.notify_all();
  };

  std::unique_lock lock(mu);
  while (true) {
    if (!failure) {
      for (const auto& name : order) {
        if (running >= options_.max_parallel) break;
        if (state[name] != State::kPending) continue;
        const PlanNode& node = plan_.node(name);
        const bool ready = std::all_of(node.deps.begin(), node.deps.end(),
                                       [&](const std::string& d) {
                                         return state[d] == State::kDone;
                                       });
        if (!ready) continue;
        std::map<std::string, NodeOutput> inputs;
        for (const auto& d : node.deps) inputs[d] = outputs.at(d);
        state[name] = State::kRunning;
        ++running;
        threads.emplace_back(worker, &node, std::move(inputs));
      }
    }
    if (running == 0) break;
    cv.wait(lock);
  }
  lock.unlock();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);

  const NodeOutput& final_out = outputs.at(order.back());
  const auto existing = workspace_.find_sequence(plan_.output);
  if (!existing || existing->id != final_out.id) {
    workspace_.store_sequence(plan_.output, *final_out.frames);
  }
  report_.final_id = final_out.id;
  return final_out.id;
}

void require_keys(const Json& j, std::initializer_list<const char*> allowed,
                  const char* what) {
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end()) {
      throw ConfigError(std::string("unknown ") + what + " field '" + key + "'");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

void PipelineConfig::validate() const {
  if (!is_valid_sequence_name(scene)) throw ConfigError("invalid scene name '" + scene + "'");
  if (!is_valid_sequence_name(output)) {
    throw ConfigError("invalid output name '" + output + "'");
  }
  if (reference.empty()) throw ConfigError("config needs a reference image");
  if (!(tau >= 0.0)) throw ConfigError("tau must be non-negative");
  if (inpaint_iters < 0) throw ConfigError("inpaint_iters must be non-negative");
  if (harmonize.block_len < 1) throw ConfigError("harmonize block_len must be positive");
  if (2 * harmonize.overlap > harmonize.block_len) {
    throw ConfigError("harmonize overlap must be at most half of block_len");
  }
  if (harmonize.stride < 1) throw ConfigError("harmonize stride must be positive");
  if (harmonize.ring_width < 1) throw ConfigError("harmonize ring_width must be positive");
  edge.validate();
  for (const auto& [stage, spec] : workers) {
    if (stage != kDefaultWorker && !is_known_stage(stage)) {
      throw ConfigError("worker given for unknown stage '" + stage + "'");
    }
    spec.validate();
  }
  std::vector<std::string_view> required = {kSegmentTrack, kPoseEstimate, kAnimate,
                                            kHarmonizeParams};
  if (removal_enabled || edge_refine_enabled) required.push_back(kInpaint);
  for (auto stage : required) worker_for(stage);
}

const WorkerSpec& PipelineConfig::worker_for(std::string_view stage) const {
  auto it = workers.find(std::string(stage));
  if (it == workers.end()) it = workers.find(kDefaultWorker);
  if (it == workers.end()) {
    throw ConfigError("no worker configured for stage '" + std::string(stage) + "'");
  }
  return it->second;
}

PipelineConfig config_from_json(const Json& j) {
  PipelineConfig c;
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    require_keys(j,
                 {"scene", "prompt", "tau", "reference", "reference_anchor", "workers",
                  "edge", "harmonize", "removal_enabled", "inpaint_iters", "output"},
                 "config");
    c.scene = j.at("scene").get<std::string>();
    try {
      c.prompt = prompt_from_json(j.at("prompt"));
    } catch (const PromptError& e) {
      throw ConfigError(std::string("config prompt: ") + e.what());
    }
    c.tau = j.value("tau", c.tau);
    c.reference = j.at("reference").get<std::string>();
    if (j.contains("reference_anchor") && !j["reference_anchor"].is_null()) {
      try {
        c.reference_anchor = keypoint_set_from_json(j["reference_anchor"]);
      } catch (const ProtocolError& e) {
        throw ConfigError(std::string("reference_anchor: ") + e.what());
      }
    }
    if (j.contains("workers")) {
      const Json& w = j["workers"];
      if (w.is_string()) {
        c.workers[kDefaultWorker] = worker_spec_from_json(w);
      } else {
        for (const auto& [stage, spec] : w.items()) {
          c.workers[stage] = worker_spec_from_json(spec);
        }
      }
    }
    if (j.contains("edge")) {
      const Json& e = j["edge"];
      require_keys(e, {"r_out", "r_in", "scale_reference_width", "enabled"}, "edge");
      c.edge.r_out = e.value("r_out", c.edge.r_out);
      c.edge.r_in = e.value("r_in", c.edge.r_in);
      c.edge.scale_reference_width =
          e.value("scale_reference_width", c.edge.scale_reference_width);
      c.edge_refine_enabled = e.value("enabled", c.edge_refine_enabled);
    }
    if (j.contains("harmonize")) {
      const Json& h = j["harmonize"];
      require_keys(h, {"block_len", "overlap", "stride", "ring_width"}, "harmonize");
      c.harmonize.block_len = h.value("block_len", c.harmonize.block_len);
      c.harmonize.overlap = h.value("overlap", c.harmonize.overlap);
      c.harmonize.stride = h.value("stride", c.harmonize.stride);
      c.harmonize.ring_width = h.value("ring_width", c.harmonize.ring_width);
    }
    c.removal_enabled = j.value("removal_enabled", c.removal_enabled);
    c.inpaint_iters = j.value("inpaint_iters", c.inpaint_iters);
    c.output = j.value("output", c.output);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

Json config_to_json(const PipelineConfig& c) {
  Json workers = Json::object();
  for (const auto& [stage, spec] : c.workers) workers[stage] = worker_spec_to_json(spec);
  Json j = {{"scene", c.scene},
            {"prompt", prompt_to_json(c.prompt)},
            {"tau", c.tau},
            {"reference", c.reference},
            {"workers", workers},
            {"edge",
             {{"r_out", c.edge.r_out},
              {"r_in", c.edge.r_in},
              {"scale_reference_width", c.edge.scale_reference_width},
              {"enabled", c.edge_refine_enabled}}},
            {"harmonize",
             {{"block_len", c.harmonize.block_len},
              {"overlap", c.harmonize.overlap},
              {"stride", c.harmonize.stride},
              {"ring_width", c.harmonize.ring_width}}},
            {"removal_enabled", c.removal_enabled},
            {"inpaint_iters", c.inpaint_iters},
            {"output", c.output}};
  if (c.reference_anchor) j["reference_anchor"] = keypoint_set_to_json(*c.reference_anchor);
  return j;
}

PipelineConfig load_config(const fs::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const NotFoundError&) {
    throw ConfigError("cannot read config '" + path.string() + "'");
  }
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError("config '" + path.string() + "' is not JSON: " + e.what());
  }
  return config_from_json(j);
}

// ---------------------------------------------------------------------------
// Plan

std::vector<std::pair<std::string, std::string>> StagePlan::edges() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& n : nodes) {
    for (const auto& d : n.deps) out.emplace_back(d, n.name);
  }
  return out;
}

bool StagePlan::has_node(std::string_view name) const {
  return std::any_of(nodes.begin(), nodes.end(),
                     [&](const PlanNode& n) { return n.name == name; });
}

const PlanNode& StagePlan::node(std::string_view name) const {
  for (const auto& n : nodes) {
    if (n.name == name) return n;
  }
  throw NotFoundError("plan has no node '" + std::string(name) + "'");
}

void StagePlan::validate() const {
  std::set<std::string> names;
  for (const auto& n : nodes) {
    if (!names.insert(n.name).second) {
      throw ConfigError("duplicate plan node '" + n.name + "'");
    }
  }
  for (const auto& n : nodes) {
    for (const auto& d : n.deps) {
      if (!names.count(d)) {
        throw ConfigError("node '" + n.name + "' depends on unknown node '" + d + "'");
      }
    }
  }
  if (topological_order().size() != nodes.size()) {
    throw ConfigError("plan contains a cycle");
  }
}

std::vector<std::string> StagePlan::topological_order() const {
  std::map<std::string, std::size_t> pending;
  for (const auto& n : nodes) pending[n.name] = n.deps.size();
  std::vector<std::string> order;
  std::set<std::string> emitted;
  bool progress = true;
  while (progress) {
    progress = false;
    for (const auto& n : nodes) {
      if (emitted.count(n.name)) continue;
      const bool ready = std::all_of(n.deps.begin(), n.deps.end(),
                                     [&](const std::string& d) { return emitted.count(d) > 0; });
      if (!ready) continue;
      order.push_back(n.name);
      emitted.insert(n.name);
      progress = true;
    }
  }
  return order;
}

StagePlan plan(const PipelineConfig& config, const Workspace& workspace) {
  config.validate();
  StagePlan p;
  p.scene = config.scene;
  p.output = config.output;
  const auto scene = workspace.find_sequence(config.scene);
  if (!scene) throw ConfigError("scene '" + config.scene + "' is not ingested");
  if (scene->channels != 3) throw ConfigError("scene must be an RGB sequence");
  config.prompt.validate(scene->width, scene->height, scene->frames);
  p.scene_id = scene->id;

  p.reference_path = fs::path(config.reference).is_absolute()
                         ? fs::path(config.reference)
                         : workspace.root() / config.reference;
  if (!fs::exists(p.reference_path)) {
    throw ConfigError("reference image '" + config.reference + "' not found");
  }
  const Frame ref = read_png(p.reference_path);
  if (ref.channels() != 4) throw ConfigError("reference image must have an alpha channel");
  p.reference_id = FrameSequence({ref}).id();
  p.reference_anchor = config.reference_anchor;

  auto add = [&](std::string_view name, Json params, std::vector<std::string> deps,
                 std::string_view worker_stage) {
    PlanNode n;
    n.name = name;
    n.deps = std::move(deps);
    if (!worker_stage.empty()) {
      n.worker_stage = worker_stage;
      n.worker = config.worker_for(worker_stage);
      params["worker"] = worker_identity(n.worker);
    }
    n.params = std::move(params);
    n.params_digest = artifact_hash(n.params.dump());
    p.nodes.push_back(std::move(n));
  };

  const std::string seg(kNodeSegment);
  add(kNodeSegment, {{"prompt", prompt_to_json(config.prompt)}, {"tau", config.tau}}, {},
      kSegmentTrack);
  if (config.removal_enabled) {
    add(kNodeRemove, {{"iters", config.inpaint_iters}}, {seg}, kInpaint);
  }
  add(kNodePose, Json::object(), {seg}, kPoseEstimate);
  add(kNodeAnimate,
      {{"width", scene->width},
       {"height", scene->height},
       {"anchor", config.reference_anchor ? keypoint_set_to_json(*config.reference_anchor)
                                          : Json()}},
      {std::string(kNodePose)}, kAnimate);
  std::vector<std::string> composite_deps;
  if (config.removal_enabled) composite_deps.emplace_back(kNodeRemove);
  composite_deps.emplace_back(kNodeAnimate);
  add(kNodeComposite, {{"removal", config.removal_enabled}}, composite_deps, "");
  add(kNodeHarmonize,
      {{"block_len", config.harmonize.block_len},
       {"overlap", config.harmonize.overlap},
       {"stride", config.harmonize.stride},
       {"ring_width", config.harmonize.ring_width}},
      {std::string(kNodeComposite), std::string(kNodeAnimate)}, kHarmonizeParams);
  Json edge = {{"enabled", config.edge_refine_enabled}};
  if (config.edge_refine_enabled) {
    edge["r_out"] = config.edge.r_out;
    edge["r_in"] = config.edge.r_in;
    edge["scale_reference_width"] = config.edge.scale_reference_width;
    edge["iters"] = config.inpaint_iters;
  }
  add(kNodeEdgeRefine, edge, {std::string(kNodeHarmonize), std::string(kNodeAnimate)},
      config.edge_refine_enabled ? kInpaint : "");
  p.validate();
  return p;
}

ArtifactId cache_key(std::string_view stage, std::string_view params,
                     std::vector<ArtifactId> inputs, std::string_view engine_version) {
  std::sort(inputs.begin(), inputs.end());
  Hasher h;
  h.update_u32(static_cast<std::uint32_t>(stage.size())).update(stage);
  h.update_u32(static_cast<std::uint32_t>(params.size())).update(params);
  h.update_u32(static_cast<std::uint32_t>(inputs.size()));
  for (const auto& id : inputs) h.update(id.bytes());
  h.update_u32(static_cast<std::uint32_t>(engine_version.size())).update(engine_version);
  return h.finish();
}

fs::path run_log_path(const Workspace& workspace, const std::string& output) {
  return workspace.root() / "logs" / (output + ".jsonl");
}

ArtifactId run(const StagePlan& plan, const Workspace& workspace,
               const RunOptions& options, RunReport* report) {
  plan.validate();
  RunReport local;
  RunReport& r = report != nullptr ? *report : local;
  r = RunReport{};
  RunOptions opts = options;
  if (opts.max_parallel < 1) opts.max_parallel = 1;
  Executor exec(plan, workspace, opts, r);
  return exec.run();
}

}  // namespace recast
