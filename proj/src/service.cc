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


#include "recast/service.h"

#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "recast/error.h"
#include "recast/mask.h"
#include "recast/pipeline.h"
#include "recast/png_io.h"
#include "recast/worker.h"

namespace recast {

namespace fs = std::filesystem;

namespace {

constexpr const char* kJson = "application/json";
constexpr const char* kPng = "image/png";

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, const std::string& kind,
                const std::string& message) {
  send_json(res, status, {{"error", kind}, {"message", message}});
}

std::optional<std::size_t> parse_index(const std::string& text) {
  if (text.empty() || text.size() > 9) return std::nullopt;
  return static_cast<std::size_t>(std::stoul(text));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot read '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

struct Job {
  std::mutex mu;
  std::string id;
  std::string state = "queued";
  std::optional<std::string> current_stage;
  std::size_t done = 0;
  std::size_t total = 0;
  std::optional<std::string> message;
  std::string output;
  std::optional<ArtifactId> result;
  std::thread thread;

  Json snapshot() {
    std::lock_guard lock(mu);
    Json j = {{"job_id", id},
              {"state", state},
              {"current_stage", current_stage ? Json(*current_stage) : Json()},
              {"progress", total == 0 ? 0.0 : static_cast<double>(done) / total},
              {"message", message ? Json(*message) : Json()}};
    if (result) {
      j["result_id"] = result->hex();
      j["output"] = output;
    }
    return j;
  }
};

}  // namespace

struct Service::Impl {
  Workspace workspace;
  ServiceOptions options;
  httplib::Server server;
  std::thread serve_thread;
  std::mutex prompt_mu;
  std::unique_ptr<WorkerClient> segment_worker;
  std::mutex jobs_mu;
  std::map<std::string, std::shared_ptr<Job>> jobs;
  std::atomic<std::uint64_t> next_job{0};
  bool bound = false;

  Impl(Workspace ws, ServiceOptions opts)
      : workspace(std::move(ws)), options(std::move(opts)) {
    routes();
  }

  fs::path mask_path(const std::string& id) const {
    return workspace.root() / "masks" / (id + ".json");
  }

  std::shared_ptr<Job> find_job(const std::string& id) {
    std::lock_guard lock(jobs_mu);
    const auto it = jobs.find(id);
    return it == jobs.end() ? nullptr : it->second;
  }

  void serve_frame(httplib::Response& res, const std::string& name,
                   const std::string& index_text) {
    const auto info = is_valid_sequence_name(name) ? workspace.find_sequence(name)
                                                   : std::nullopt;
    const auto index = parse_index(index_text);
    if (!info || !index || *index >= info->frames) {
      send_error(res, 404, "NotFoundError", "no frame " + index_text + " in '" + name + "'");
      return;
    }
    res.set_content(read_file(workspace.frame_path(name, *index)), kPng);
  }

  void handle_prompt(const httplib::Request& req, httplib::Response& res) {
    Json body;
    try {
      body = Json::parse(req.body);
    } catch (const Json::exception& e) {
      send_error(res, 400, "ProtocolError", std::string("body is not JSON: ") + e.what());
      return;
    }
    if (!body.is_object()) {
      send_error(res, 422, "PromptError", "prompt must be a JSON object");
      return;
    }
    std::string name = body.value("sequence", std::string());
    if (name.empty()) {
      const auto m = workspace.manifest();
      if (m.sequences.size() != 1) {
        send_error(res, 422, "PromptError",
                   "name the sequence: the workspace holds " +
                       std::to_string(m.sequences.size()) + " sequences");
        return;
      }
      name = m.sequences.begin()->first;
    }
    if (!is_valid_sequence_name(name) || !workspace.find_sequence(name)) {
      send_error(res, 404, "NotFoundError", "unknown sequence '" + name + "'");
      return;
    }
    const double tau = body.value("tau", options.default_tau);
    try {
      const Prompt prompt = prompt_from_json(body);
      const FrameSequence frames = workspace.load_sequence(name);
      MaskSequence masks = [&] {
        std::lock_guard lock(prompt_mu);
        if (!segment_worker) {
          segment_worker =
              std::make_unique<WorkerClient>(options.segment_worker, workspace);
        }
        return call_segment_track(*segment_worker, frames, prompt, tau);
      }();
      const std::string id = masks.id().hex();
      const fs::path path = mask_path(id);
      if (!fs::exists(path)) {
        const fs::path tmp = path.string() + ".tmp";
        write_mask_sequence(tmp, masks);
        fs::rename(tmp, path);
      }
      send_json(res, 200,
                {{"mask_id", id},
                 {"sequence", name},
                 {"frames", masks.size()},
                 {"width", masks.width()},
                 {"height", masks.height()}});
    } catch (const PromptError& e) {
      send_error(res, 422, e.kind(), e.what());
    } catch (const Error& e) {
      send_error(res, 500, e.kind(), e.what());
    }
  }

  void handle_mask_frame(httplib::Response& res, const std::string& id,
                         const std::string& index_text) {
    const auto index = parse_index(index_text);
    if (!ArtifactId::is_valid_hex(id) || !index || !fs::exists(mask_path(id))) {
      send_error(res, 404, "NotFoundError", "unknown mask '" + id + "'");
      return;
    }
    const MaskSequence masks = read_mask_sequence(mask_path(id));
    if (*index >= masks.size()) {
      send_error(res, 404, "NotFoundError", "no mask frame " + index_text);
      return;
    }
    res.set_content(encode_png(mask_to_gray(masks[*index])), kPng);
  }

  void handle_submit(const httplib::Request& req, httplib::Response& res) {
    StagePlan stage_plan;
    try {
      const PipelineConfig config = config_from_json(Json::parse(req.body));
      stage_plan = plan(config, workspace);
    } catch (const Json::exception& e) {
      send_error(res, 400, "ConfigError", std::string("body is not JSON: ") + e.what());
      return;
    } catch (const Error& e) {
      send_error(res, 422, e.kind(), e.what());
      return;
    }
    auto job = std::make_shared<Job>();
    job->id = "job-" + std::to_string(++next_job);
    job->total = stage_plan.nodes.size();
    job->output = stage_plan.output;
    {
      std::lock_guard lock(jobs_mu);
      jobs[job->id] = job;
    }
    std::lock_guard lock(job->mu);
    job->thread = std::thread([this, job, p = std::move(stage_plan)] {
      {
        std::lock_guard l(job->mu);
        job->state = "running";
      }
      RunOptions opts;
      opts.on_node_start = [job](const std::string& node) {
        std::lock_guard l(job->mu);
        job->current_stage = node;
      };
      opts.on_node_done = [job](const std::string&, bool) {
        std::lock_guard l(job->mu);
        ++job->done;
      };
      try {
        const ArtifactId id = run(p, workspace, opts);
        std::lock_guard l(job->mu);
        job->result = id;
        job->done = job->total;
        job->current_stage.reset();
        job->state = "done";
      } catch (const std::exception& e) {
        std::lock_guard l(job->mu);
        job->state = "failed";
        job->message = e.what();
      }
    });
    send_json(res, 200, {{"job_id", job->id}});
  }

  void handle_result_frame(httplib::Response& res, const std::string& id,
                           const std::string& index_text) {
    const auto job = find_job(id);
    if (!job) {
      send_error(res, 404, "NotFoundError", "unknown job '" + id + "'");
      return;
    }
    std::string output;
    {
      std::lock_guard lock(job->mu);
      if (job->state != "done") {
        send_error(res, 409, "NotReady", "job '" + id + "' is " + job->state);
        return;
      }
      output = job->output;
    }
    serve_frame(res, output, index_text);
  }

  void routes() {
    server.set_exception_handler(
        [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
          try {
            std::rethrow_exception(ep);
          } catch (const Error& e) {
            send_error(res, 500, e.kind(), e.what());
          } catch (const std::exception& e) {
            send_error(res, 500, "InternalError", e.what());
          }
        });
    server.Get("/api/sequences", [this](const httplib::Request&, httplib::Response& res) {
      Json list = Json::array();
      for (const auto& [name, info] : workspace.manifest().sequences) {
        list.push_back({{"name", name},
                        {"frames", info.frames},
                        {"width", info.width},
                        {"height", info.height},
                        {"channels", info.channels},
                        {"fps", info.fps.str()},
                        {"id", info.id.hex()}});
      }
      send_json(res, 200, {{"sequences", list}});
    });
    server.Get(R"(/api/sequences/([^/]+)/frames/(\d+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 serve_frame(res, req.matches[1], req.matches[2]);
               });
    server.Post("/api/prompt", [this](const httplib::Request& req, httplib::Response& res) {
      handle_prompt(req, res);
    });
    server.Get(R"(/api/masks/([^/]+)/frames/(\d+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 handle_mask_frame(res, req.matches[1], req.matches[2]);
               });
    server.Post("/api/jobs", [this](const httplib::Request& req, httplib::Response& res) {
      handle_submit(req, res);
    });
    server.Get(R"(/api/jobs/([^/]+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 const auto job = find_job(req.matches[1]);
                 if (!job) {
                   send_error(res, 404, "NotFoundError",
                              "unknown job '" + std::string(req.matches[1]) + "'");
                   return;
                 }
                 send_json(res, 200, job->snapshot());
               });
    server.Get(R"(/api/jobs/([^/]+)/result/frames/(\d+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 handle_result_frame(res, req.matches[1], req.matches[2]);
               });
    if (!options.static_dir.empty()) {
      server.set_mount_point("/", options.static_dir.string());
    }
  }
};

Service::Service(Workspace workspace, ServiceOptions options)
    : impl_(std::make_unique<Impl>(std::move(workspace), std::move(options))) {}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw ConfigError("cannot bind " + host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->bound = true;
  return bound;
}

void Service::serve() {
  if (!impl_->bound) throw ConfigError("serve() before bind()");
  impl_->server.listen_after_bind();
}

void Service::start() {
  if (!impl_->bound) throw ConfigError("start() before bind()");
  impl_->serve_thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->serve_thread.joinable()) impl_->serve_thread.join();
  std::map<std::string, std::shared_ptr<Job>> jobs;
  {
    std::lock_guard lock(impl_->jobs_mu);
    jobs = impl_->jobs;
  }
  for (auto& [id, job] : jobs) {
    std::thread t;
    {
      std::lock_guard lock(job->mu);
      t = std::move(job->thread);
    }
    if (t.joinable()) t.join();
  }
}

}  // namespace recast
