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


#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "recast/cli.h"
#include "recast/error.h"
#include "recast/pipeline.h"
#include "recast/png_io.h"
#include "recast/process.h"
#include "recast/service.h"
#include "recast/stubs.h"
#include "support/fixtures.h"

namespace recast {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli_dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
  return s;
}

void write_json(const fs::path& path, const Json& j) { std::ofstream(path) << j.dump(2); }

GrayImage decode_gray(const std::string& png, const fs::path& scratch) {
  std::ofstream(scratch, std::ios::binary) << png;
  return read_png_gray(scratch);
}

Json poll_job(httplib::Client& client, const std::string& id) {
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(60);
  while (std::chrono::steady_clock::now() < deadline) {
    const auto res = client.Get("/api/jobs/" + id);
    REQUIRE(res);
    const Json status = Json::parse(res->body);
    if (status.at("state") == "done" || status.at("state") == "failed") return status;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  FAIL("job did not finish");
  return {};
}

struct ServiceFixture {
  TempDir tmp;
  Workspace ws = Workspace::open(tmp.path() / "ws");
  PipelineConfig config = testing::setup_fixture_workspace(ws);
  Service service{ws};
  int port = service.bind("127.0.0.1", 0);
  ServiceFixture() { service.start(); }
  ~ServiceFixture() { service.stop(); }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(60, 0);
    return c;
  }
};

TEST_SUITE("interface") {

TEST_CASE("cli run on the fixture prints the final id") {
  TempDir tmp;
  const Workspace ws = Workspace::open(tmp.path() / "ws");
  const PipelineConfig config = testing::setup_fixture_workspace(ws);
  write_json(tmp.path() / "c.json", config_to_json(config));
  const CliResult r =
      cli({"run", "--config", (tmp.path() / "c.json").string(), "--workspace", ws.root().string()});
  CHECK(r.code == kExitOk);
  CHECK(trim(r.out) == Workspace::open(ws.root()).find_sequence("result")->id.hex());

  const CliResult v = cli({"verify-cache", "--config", (tmp.path() / "c.json").string(),
                           "--workspace", ws.root().string()});
  CHECK(v.code == kExitOk);
  CHECK(v.out.find("7 hits") != std::string::npos);
}

TEST_CASE("cli exit codes") {
  TempDir tmp;
  const Workspace ws = Workspace::open(tmp.path() / "ws");
  CHECK(cli({"run", "--config", (tmp.path() / "missing.json").string(), "--workspace",
             ws.root().string()})
            .code == kExitConfig);
  CHECK(cli({"run"}).code == kExitConfig);
  CHECK(cli({"frobnicate"}).code == kExitConfig);

  PipelineConfig config = testing::setup_fixture_workspace(ws);
  WorkerSpec broken;
  broken.transport = Transport::kSubprocess;
  broken.command = {testing::worker_bin(), "--fault", "error", "--fault-stage", "harmonize_params"};
  config.workers["harmonize_params"] = broken;
  write_json(tmp.path() / "c.json", config_to_json(config));
  const CliResult r =
      cli({"run", "--config", (tmp.path() / "c.json").string(), "--workspace", ws.root().string()});
  CHECK(r.code == kExitStage);
  CHECK(r.err.find("stage 'harmonize' failed") != std::string::npos);
}

TEST_CASE("the cli binary reports exit codes to the shell") {
  TempDir tmp;
  const CommandResult missing =
      run_shell(shell_quote(testing::cli_bin()) + " run --config " +
                shell_quote((tmp.path() / "nope.json").string()) + " --workspace " +
                shell_quote((tmp.path() / "ws").string()));
  CHECK(missing.exit_code == 2);
  const CommandResult help = run_shell(shell_quote(testing::cli_bin()) + " --help");
  CHECK(help.exit_code == 0);
  CHECK(help.output.find("verify-cache") != std::string::npos);
}

TEST_CASE("step-by-step cli commands agree with the library") {
  TempDir tmp;
  const fs::path root = tmp.path() / "ws";
  const testing::Clip clip = testing::moving_square_clip(4);
  write_sequence(tmp.path() / "frames", clip.frames);
  write_png(tmp.path() / "ref.png", testing::blue_reference());
  write_json(tmp.path() / "prompt.json", prompt_to_json(testing::square_prompt()));
  const std::string ws = root.string();

  const CliResult ingest = cli({"ingest", "--workspace", ws, "--name", "scene", "--frames",
                                (tmp.path() / "frames").string()});
  REQUIRE(ingest.code == 0);
  CHECK(trim(ingest.out) == clip.frames.id().hex());

  const CliResult seg = cli({"segment", "--workspace", ws, "--sequence", "scene", "--prompt",
                             (tmp.path() / "prompt.json").string()});
  REQUIRE(seg.code == 0);
  const MaskSequence masks = stub_segment_track(clip.frames, testing::square_prompt(), 30.0);
  const std::string mask_id = trim(seg.out);
  CHECK(mask_id == masks.id().hex());

  const CliResult rem = cli({"remove", "--workspace", ws, "--sequence", "scene", "--masks",
                             mask_id, "--output", "clean", "--iters", "50"});
  REQUIRE(rem.code == 0);
  CHECK(trim(rem.out) == stub_inpaint(clip.frames, masks, 50).id().hex());

  const CliResult anim = cli({"animate", "--workspace", ws, "--sequence", "scene", "--masks",
                              mask_id, "--reference", (tmp.path() / "ref.png").string(),
                              "--output", "actor"});
  REQUIRE(anim.code == 0);

  const CliResult comp = cli({"compose", "--workspace", ws, "--foreground", "actor",
                              "--background", "clean", "--output", "comp"});
  REQUIRE(comp.code == 0);
  CHECK(Workspace::open(root).find_sequence("comp")->frames == 4);

  CHECK(cli({"remove", "--workspace", ws, "--sequence", "scene", "--masks", std::string(64, 'a'),
             "--output", "x"})
            .code == kExitConfig);
}

TEST_CASE("the video path runs the decoder") {
  TempDir tmp;
  write_sequence(tmp.path() / "src", testing::moving_square_clip(2).frames);
  std::ofstream(tmp.path() / "clip.mp4") << "x";
  const std::string decoder =
      "test -f {in} && cp " + shell_quote((tmp.path() / "src").string()) + "/*.png {out}/";
  const CliResult r = cli({"ingest", "--workspace", (tmp.path() / "ws").string(), "--name",
                           "v", "--video", (tmp.path() / "clip.mp4").string(), "--decoder",
                           decoder, "--fps", "30000/1001"});
  CHECK(r.code == 0);
  const auto info = Workspace::open(tmp.path() / "ws").find_sequence("v");
  REQUIRE(info.has_value());
  CHECK(info->frames == 2);
  CHECK(info->fps == Rational{30000, 1001});
  const CliResult bad = cli({"ingest", "--workspace", (tmp.path() / "ws").string(), "--name",
                             "w", "--video", (tmp.path() / "clip.mp4").string(), "--decoder",
                             "exit 4 {in} {out}"});
  CHECK(bad.code == kExitConfig);
}

TEST_CASE("service lists sequences and serves frames") {
  ServiceFixture fx;
  auto c = fx.client();
  const auto list = c.Get("/api/sequences");
  REQUIRE(list);
  CHECK(list->status == 200);
  const Json body = Json::parse(list->body);
  REQUIRE(body.at("sequences").size() == 1);
  CHECK(body["sequences"][0]["name"] == "scene");
  CHECK(body["sequences"][0]["frames"] == 16);

  const auto frame = c.Get("/api/sequences/scene/frames/3");
  REQUIRE(frame);
  CHECK(frame->status == 200);
  CHECK(frame->get_header_value("Content-Type") == "image/png");
  std::ofstream(fx.tmp.path() / "f.png", std::ios::binary) << frame->body;
  CHECK(read_png(fx.tmp.path() / "f.png") == fx.ws.load_sequence("scene")[3]);

  CHECK(c.Get("/api/sequences/scene/frames/16")->status == 404);
  CHECK(c.Get("/api/sequences/ghost/frames/0")->status == 404);
}

TEST_CASE("prompting returns a mask preview equal to the stub output") {
  ServiceFixture fx;
  auto c = fx.client();
  const ArtifactId scene_before = fx.ws.find_sequence("scene")->id;
  const auto res =
      c.Post("/api/prompt", prompt_to_json(testing::square_prompt()).dump(), "application/json");
  REQUIRE(res);
  REQUIRE(res->status == 200);
  const Json body = Json::parse(res->body);
  const MaskSequence expected =
      stub_segment_track(fx.ws.load_sequence("scene"), testing::square_prompt(), 30.0);
  CHECK(body.at("mask_id") == expected.id().hex());
  CHECK(body.at("frames") == 16);

  const auto preview = c.Get("/api/masks/" + body["mask_id"].get<std::string>() + "/frames/0");
  REQUIRE(preview);
  REQUIRE(preview->status == 200);
  const GrayImage gray = decode_gray(preview->body, fx.tmp.path() / "m.png");
  CHECK(gray.data == mask_to_gray(expected[0]).data);

  // A second prompt gets its own id and the first stays addressable.
  Prompt other = testing::square_prompt();
  other.points[0] = {2, 2, true};
  const auto res2 = c.Post("/api/prompt", prompt_to_json(other).dump(), "application/json");
  REQUIRE(res2->status == 200);
  CHECK(Json::parse(res2->body).at("mask_id") != body.at("mask_id"));
  CHECK(c.Get("/api/masks/" + body["mask_id"].get<std::string>() + "/frames/0")->status == 200);
  CHECK(fx.ws.find_sequence("scene")->id == scene_before);

  CHECK(c.Get("/api/masks/" + body["mask_id"].get<std::string>() + "/frames/99")->status == 404);
  CHECK(c.Get("/api/masks/" + std::string(64, 'b') + "/frames/0")->status == 404);
}

TEST_CASE("bad prompts are client errors") {
  ServiceFixture fx;
  auto c = fx.client();
  CHECK(c.Post("/api/prompt", "{oops", "application/json")->status == 400);
  CHECK(c.Post("/api/prompt", R"({"points":[{"x":999,"y":1}]})", "application/json")->status ==
        422);
  CHECK(c.Post("/api/prompt", R"({"kind":"lasso"})", "application/json")->status == 422);
  CHECK(c.Post("/api/prompt", R"({"sequence":"ghost","points":[{"x":1,"y":1}]})",
               "application/json")
            ->status == 404);
}

TEST_CASE("jobs run to completion and match the cli result") {
  ServiceFixture fx;
  auto c = fx.client();
  const auto submit = c.Post("/api/jobs", config_to_json(fx.config).dump(), "application/json");
  REQUIRE(submit);
  REQUIRE(submit->status == 200);
  const std::string job = Json::parse(submit->body).at("job_id");
  const Json status = poll_job(c, job);
  CHECK(status.at("state") == "done");
  CHECK(status.at("progress") == 1.0);
  const std::string result_id = status.at("result_id");
  CHECK(fx.ws.find_sequence("result")->id.hex() == result_id);

  const auto frame = c.Get("/api/jobs/" + job + "/result/frames/0");
  REQUIRE(frame);
  CHECK(frame->status == 200);

  TempDir other;
  const Workspace ws2 = Workspace::open(other.path() / "ws");
  const PipelineConfig config2 = testing::setup_fixture_workspace(ws2);
  write_json(other.path() / "c.json", config_to_json(config2));
  const CliResult r = cli(
      {"run", "--config", (other.path() / "c.json").string(), "--workspace", ws2.root().string()});
  CHECK(trim(r.out) == result_id);
}

TEST_CASE("job errors") {
  ServiceFixture fx;
  auto c = fx.client();
  CHECK(c.Get("/api/jobs/job-999")->status == 404);
  CHECK(c.Post("/api/jobs", "{", "application/json")->status == 400);
  Json bad = config_to_json(fx.config);
  bad["scene"] = "ghost";
  CHECK(c.Post("/api/jobs", bad.dump(), "application/json")->status == 422);

  PipelineConfig failing = fx.config;
  WorkerSpec broken;
  broken.transport = Transport::kSubprocess;
  broken.command = {testing::worker_bin(), "--fault", "error", "--fault-stage", "inpaint"};
  failing.workers["inpaint"] = broken;
  const auto submit = c.Post("/api/jobs", config_to_json(failing).dump(), "application/json");
  REQUIRE(submit->status == 200);
  const std::string job = Json::parse(submit->body).at("job_id");
  const Json status = poll_job(c, job);
  CHECK(status.at("state") == "failed");
  CHECK(status.at("message").get<std::string>().find("InjectedFault") != std::string::npos);
  CHECK(c.Get("/api/jobs/" + job + "/result/frames/0")->status == 409);
}

}  // TEST_SUITE

}  // namespace
}  // namespace recast
