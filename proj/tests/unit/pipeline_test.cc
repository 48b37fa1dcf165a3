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


#include <algorithm>
#include <fstream>
#include <set>

#include "doctest.h"
#include "recast/composite.h"
#include "recast/error.h"
#include "recast/pipeline.h"
#include "recast/png_io.h"
#include "recast/stubs.h"
#include "support/fixtures.h"

namespace recast {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

std::map<std::string, ArtifactId> node_keys(const Workspace& ws) {
  std::map<std::string, ArtifactId> keys;
  for (const auto& dir : fs::directory_iterator(ws.cache_dir())) {
    if (!fs::exists(dir.path() / "entry.json")) continue;
    std::ifstream in(dir.path() / "entry.json");
    const Json e = Json::parse(in);
    keys[e.at("stage").get<std::string>()] = ArtifactId::from_hex(e.at("key").get<std::string>());
  }
  return keys;
}

WorkerSpec fault_worker(const std::string& fault, const std::string& stage) {
  WorkerSpec spec;
  spec.transport = Transport::kSubprocess;
  spec.command = {testing::worker_bin(), "--fault", fault, "--fault-stage", stage};
  spec.timeout_seconds = 30;
  return spec;
}

struct PipelineFixture {
  TempDir tmp;
  Workspace ws = Workspace::open(tmp.path() / "ws");
  PipelineConfig config = testing::setup_fixture_workspace(ws);
};

TEST_SUITE("pipeline") {

TEST_CASE("config json roundtrip") {
  PipelineConfig c;
  c.scene = "scene";
  c.prompt = testing::square_prompt();
  c.reference = "ref.png";
  c.workers["default"] = WorkerSpec{};
  WorkerSpec identity;
  identity.builtin = "identity";
  c.workers["harmonize_params"] = identity;
  c.edge.r_out = 9;
  c.edge_refine_enabled = false;
  c.harmonize.ring_width = 6;
  c.removal_enabled = false;
  c.inpaint_iters = 42;
  c.output = "final";
  const PipelineConfig back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK(back.worker_for("harmonize_params").builtin == "identity");
  CHECK(back.worker_for("inpaint").builtin == "stub");
}

TEST_CASE("config errors") {
  const Json base = {{"scene", "s"},
                     {"prompt", {{"points", {{{"x", 1}, {"y", 1}}}}}},
                     {"reference", "r.png"},
                     {"workers", "stub"}};
  CHECK_NOTHROW(config_from_json(base));
  Json extra = base;
  extra["colour"] = "blue";
  CHECK_THROWS_AS(config_from_json(extra), ConfigError);
  Json overlap = base;
  overlap["harmonize"] = {{"block_len", 4}, {"overlap", 4}};
  CHECK_THROWS_AS(config_from_json(overlap), ConfigError);
  overlap["harmonize"] = {{"block_len", 5}, {"overlap", 3}};
  CHECK_THROWS_AS(config_from_json(overlap), ConfigError);
  Json no_worker = base;
  no_worker["workers"] = {{"inpaint", "stub"}};
  CHECK_THROWS_AS(config_from_json(no_worker), ConfigError);
  Json bad_edge = base;
  bad_edge["edge"] = {{"r_out", 0}};
  CHECK_THROWS_AS(config_from_json(bad_edge), ConfigError);
  TempDir tmp;
  CHECK_THROWS_AS(load_config(tmp.path() / "missing.json"), ConfigError);
  std::ofstream(tmp.path() / "bad.json") << "{not json";
  CHECK_THROWS_AS(load_config(tmp.path() / "bad.json"), ConfigError);
}

TEST_CASE("default plan runs segmentation first and edge refinement last") {
  PipelineFixture fx;
  const StagePlan p = plan(fx.config, fx.ws);
  const auto order = p.topological_order();
  REQUIRE(order.size() == 7);
  CHECK(order.front() == kNodeSegment);
  CHECK(order.back() == kNodeEdgeRefine);
  const auto pos = [&](std::string_view n) {
    return std::find(order.begin(), order.end(), n) - order.begin();
  };
  for (const auto& [from, to] : p.edges()) CHECK(pos(from) < pos(to));
  CHECK(as_set(p.node(kNodeComposite).deps) ==
        std::set<std::string>{std::string(kNodeRemove), std::string(kNodeAnimate)});
}

TEST_CASE("without removal the composite reads the raw scene") {
  PipelineFixture fx;
  fx.config.removal_enabled = false;
  const StagePlan p = plan(fx.config, fx.ws);
  CHECK_FALSE(p.has_node(kNodeRemove));
  CHECK(p.node(kNodeComposite).deps == std::vector<std::string>{std::string(kNodeAnimate)});
  const ArtifactId id = run(p, fx.ws);
  const FrameSequence scene = fx.ws.load_sequence("scene");
  const auto composite = testing::cached_frames(fx.ws, std::string(kNodeComposite));
  REQUIRE(composite.has_value());
  const auto animate = testing::cached_frames(fx.ws, std::string(kNodeAnimate));
  CHECK(composite->id() == composite_sequence(*animate, scene).id());
  CHECK(fx.ws.find_sequence("result")->id == id);
}

TEST_CASE("hand-built plans are validated") {
  StagePlan p;
  PlanNode a, b;
  a.name = "a";
  a.deps = {"b"};
  b.name = "b";
  b.deps = {"a"};
  p.nodes = {a, b};
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.nodes = {a, a};
  CHECK_THROWS_AS(p.validate(), ConfigError);
  PlanNode c;
  c.name = "c";
  c.deps = {"ghost"};
  p.nodes = {c};
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("planning checks the scene, prompt and reference") {
  PipelineFixture fx;
  PipelineConfig missing = fx.config;
  missing.scene = "nope";
  CHECK_THROWS_AS(plan(missing, fx.ws), ConfigError);
  PipelineConfig outside = fx.config;
  outside.prompt.points[0].x = 500;
  CHECK_THROWS_AS(plan(outside, fx.ws), PromptError);
  write_png(fx.ws.root() / "rgb.png", Frame(8, 8, 3));
  PipelineConfig opaque = fx.config;
  opaque.reference = "rgb.png";
  CHECK_THROWS_AS(plan(opaque, fx.ws), ConfigError);
  PipelineConfig gone = fx.config;
  gone.reference = "gone.png";
  CHECK_THROWS_AS(plan(gone, fx.ws), ConfigError);
}

TEST_CASE("cache keys") {
  const ArtifactId a = artifact_hash(std::string_view("a"));
  const ArtifactId b = artifact_hash(std::string_view("b"));
  CHECK(cache_key("inpaint", "{\"iters\":1}", {a, b}) ==
        cache_key("inpaint", "{\"iters\":1}", {a, b}));
  CHECK(cache_key("inpaint", "{\"iters\":1}", {a, b}) ==
        cache_key("inpaint", "{\"iters\":1}", {b, a}));
  CHECK(cache_key("inpaint", "{\"iters\":1}", {a, b}) !=
        cache_key("inpaint", "{\"iters\":2}", {a, b}));
  CHECK(cache_key("inpaint", "{}", {a}) != cache_key("inpaint", "{}", {b}));
  CHECK(cache_key("inpaint", "{}", {a}) != cache_key("remove", "{}", {a}));
  CHECK(cache_key("inpaint", "{}", {a}) != cache_key("inpaint", "{}", {a}, "recast-2.0.0"));
  // Field boundaries are unambiguous.
  CHECK(cache_key("ab", "c", {}) != cache_key("a", "bc", {}));
}

TEST_CASE("a second run is all cache hits with the same id") {
  PipelineFixture fx;
  const StagePlan p = plan(fx.config, fx.ws);
  RunReport first, second;
  const ArtifactId id1 = run(p, fx.ws, {}, &first);
  const ArtifactId id2 = run(p, fx.ws, {}, &second);
  CHECK(id1 == id2);
  CHECK(first.executed.size() == 7);
  CHECK(first.cache_hits.empty());
  CHECK(second.executed.empty());
  CHECK(second.cache_hits.size() == 7);
  CHECK(fx.ws.load_sequence("result").id() == id1);
}

TEST_CASE("the final output matches the library composition") {
  PipelineFixture fx;
  RunReport report;
  run(plan(fx.config, fx.ws), fx.ws, {}, &report);
  const FrameSequence scene = fx.ws.load_sequence("scene");
  const MaskSequence masks = stub_segment_track(scene, fx.config.prompt, fx.config.tau);
  const FrameSequence removed = stub_inpaint(scene, masks, fx.config.inpaint_iters);
  CHECK(testing::cached_frames(fx.ws, std::string(kNodeRemove))->id() == removed.id());
  const FrameSequence animated =
      stub_animate({testing::blue_reference(), std::nullopt}, stub_pose(masks),
                   scene.width(), scene.height());
  CHECK(testing::cached_frames(fx.ws, std::string(kNodeAnimate))->id() == animated.id());
}

TEST_CASE("changing only the edge radius re-executes only edge refinement") {
  PipelineFixture fx;
  run(plan(fx.config, fx.ws), fx.ws);
  fx.config.edge.r_out = 12;
  RunReport report;
  run(plan(fx.config, fx.ws), fx.ws, {}, &report);
  CHECK(report.executed == std::vector<std::string>{std::string(kNodeEdgeRefine)});
  CHECK(report.cache_hits.size() == 6);
}

TEST_CASE("swapping the harmonize worker changes only downstream keys") {
  PipelineFixture fx;
  const StagePlan stub_plan = plan(fx.config, fx.ws);
  WorkerSpec identity;
  identity.builtin = "identity";
  fx.config.workers["harmonize_params"] = identity;
  const StagePlan id_plan = plan(fx.config, fx.ws);
  for (const auto& n : stub_plan.nodes) {
    const bool same = n.params_digest == id_plan.node(n.name).params_digest;
    CHECK(same == (n.name != kNodeHarmonize));
  }
  run(stub_plan, fx.ws);
  RunReport report;
  run(id_plan, fx.ws, {}, &report);
  CHECK(as_set(report.executed) ==
        std::set<std::string>{std::string(kNodeHarmonize), std::string(kNodeEdgeRefine)});
}

TEST_CASE("verification re-executes hits and finds no mismatch") {
  PipelineFixture fx;
  const StagePlan p = plan(fx.config, fx.ws);
  run(p, fx.ws);
  RunOptions opts;
  opts.verify_cache = true;
  RunReport report;
  run(p, fx.ws, opts, &report);
  CHECK(report.cache_hits.size() == 7);
  CHECK(report.verify_mismatches.empty());
}

TEST_CASE("a cache entry whose content no longer matches its id is a miss") {
  PipelineFixture fx;
  const StagePlan p = plan(fx.config, fx.ws);
  run(p, fx.ws);
  // Rewrite the stored poses with a shifted skeleton and a matching id.
  for (const auto& dir : fs::directory_iterator(fx.ws.cache_dir())) {
    std::ifstream in(dir.path() / "entry.json");
    Json e = Json::parse(in);
    if (e.at("stage") != kNodePose) continue;
    std::ifstream pin(dir.path() / "poses.json");
    PoseSequence poses =
        pose_sequence_from_json(std::string(std::istreambuf_iterator<char>(pin), {}));
    poses.frames[0][kNose].x += 1;
    std::ofstream(dir.path() / "poses.json") << pose_sequence_to_json(poses);
  }
  RunReport report;
  run(p, fx.ws, {}, &report);
  CHECK(std::find(report.executed.begin(), report.executed.end(), kNodePose) !=
        report.executed.end());
}

TEST_CASE("a failing stage leaves no partial cache entry") {
  PipelineFixture fx;
  fx.config.workers["harmonize_params"] = fault_worker("error", "harmonize_params");
  const StagePlan p = plan(fx.config, fx.ws);
  RunReport report;
  CHECK_THROWS_AS(run(p, fx.ws, {}, &report), StageError);
  CHECK(report.failed_node == kNodeHarmonize);
  const auto keys = node_keys(fx.ws);
  CHECK(keys.count(std::string(kNodeComposite)) == 1);
  CHECK(keys.count(std::string(kNodeHarmonize)) == 0);
  CHECK(keys.count(std::string(kNodeEdgeRefine)) == 0);
  for (const auto& dir : fs::directory_iterator(fx.ws.cache_dir())) {
    CHECK(dir.path().filename().string().rfind(".tmp-", 0) != 0);
  }
  CHECK_FALSE(fx.ws.find_sequence("result").has_value());

  bool logged = false;
  for (const auto& line : testing::read_lines(run_log_path(fx.ws, "result"))) {
    const Json j = Json::parse(line);
    if (j.at("event") == "stage_failed" && j.at("stage") == kNodeHarmonize) logged = true;
  }
  CHECK(logged);

  // A healthy worker resumes from the completed stages.
  fx.config.workers.erase("harmonize_params");
  RunReport resumed;
  run(plan(fx.config, fx.ws), fx.ws, {}, &resumed);
  CHECK(as_set(resumed.executed) ==
        std::set<std::string>{std::string(kNodeHarmonize), std::string(kNodeEdgeRefine)});
}

TEST_CASE("contract violations in the pipeline are never cached") {
  PipelineFixture fx;
  fx.config.workers["inpaint"] = fault_worker("out-of-band", "inpaint");
  CHECK_THROWS_AS(run(plan(fx.config, fx.ws), fx.ws), ContractViolationError);
  CHECK(node_keys(fx.ws).count(std::string(kNodeRemove)) == 0);
}

TEST_CASE("run log records every node") {
  PipelineFixture fx;
  const StagePlan p = plan(fx.config, fx.ws);
  run(p, fx.ws);
  run(p, fx.ws);
  std::map<std::string, int> counts;
  for (const auto& line : testing::read_lines(run_log_path(fx.ws, "result"))) {
    const Json j = Json::parse(line);
    CHECK(j.contains("ms"));
    CHECK(j.contains("key"));
    ++counts[j.at("event").get<std::string>()];
  }
  CHECK(counts["stage_start"] == 7);
  CHECK(counts["stage_done"] == 7);
  CHECK(counts["cache_hit"] == 7);
}

TEST_CASE("disabled edge refinement passes harmonized frames through") {
  PipelineFixture fx;
  fx.config.edge_refine_enabled = false;
  const ArtifactId id = run(plan(fx.config, fx.ws), fx.ws);
  CHECK(testing::cached_frames(fx.ws, std::string(kNodeHarmonize))->id() == id);
}

TEST_CASE("node callbacks fire once per node") {
  PipelineFixture fx;
  std::mutex mu;
  std::vector<std::string> started, done;
  RunOptions opts;
  opts.on_node_start = [&](const std::string& n) {
    std::lock_guard lock(mu);
    started.push_back(n);
  };
  opts.on_node_done = [&](const std::string& n, bool) {
    std::lock_guard lock(mu);
    done.push_back(n);
  };
  run(plan(fx.config, fx.ws), fx.ws, opts);
  CHECK(started.size() == 7);
  CHECK(as_set(done) == as_set(started));
}

}  // TEST_SUITE

}  // namespace
}  // namespace recast
