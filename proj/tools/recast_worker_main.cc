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


// Standalone stub worker. Speaks the worker protocol over stdin/stdout, or
// over HTTP with --http. Fault flags make it misbehave on purpose.

#include <iostream>
#include <mutex>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "httplib.h"
#include "recast/error.h"
#include "recast/stub_handler.h"

namespace {

int serve_stdio(recast::StubHandler& handler) {
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    bool shutdown = false;
    const auto reply = handler.on_message(line, &shutdown);
    if (reply) std::cout << *reply << '\n' << std::flush;
    if (shutdown) break;
  }
  return 0;
}

int serve_http(recast::StubHandler& handler, const std::string& host, int port) {
  httplib::Server server;
  std::mutex mu;
  auto handle = [&](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    const auto reply = handler.on_message(req.body);
    res.set_content(reply.value_or("{}"), "application/json");
  };
  server.Post("/hello", handle);
  server.Post("/invoke", handle);
  server.Post("/shutdown", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content("{}", "application/json");
    std::thread([&server] { server.stop(); }).detach();
  });
  const int bound = port == 0 ? server.bind_to_any_port(host)
                              : (server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    std::cerr << "recast_worker: cannot bind " << host << ":" << port << "\n";
    return 1;
  }
  std::cout << "listening on " << host << ":" << bound << std::endl;
  server.listen_after_bind();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic stub worker", "recast_worker"};
  recast::StubOptions options;
  std::string fault = "none";
  std::string host = "127.0.0.1";
  int http_port = -1;
  app.add_option("--personality", options.personality, "stub or identity");
  app.add_option("--fault", fault, "Injected fault, e.g. wrong-length");
  app.add_option("--fault-stage", options.fault_stage, "Only fault this stage");
  app.add_option("--max-batch", options.max_batch, "Advertised max_batch");
  app.add_option("--http", http_port, "Serve HTTP on this port (0 = any)");
  app.add_option("--host", host, "HTTP bind address");
  CLI11_PARSE(app, argc, argv);

  try {
    options.fault = recast::parse_fault(fault);
    recast::StubHandler handler(options);
    return http_port >= 0 ? serve_http(handler, host, http_port) : serve_stdio(handler);
  } catch (const recast::Error& e) {
    std::cerr << "recast_worker: " << e.what() << "\n";
    return 2;
  }
}
