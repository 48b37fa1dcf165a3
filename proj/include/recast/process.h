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


#ifndef RECAST_PROCESS_H_
#define RECAST_PROCESS_H_

#include <sys/types.h>

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace recast {

struct CommandResult {
  int exit_code = 0;
  // Interleaved stdout and stderr.
  std::string output;
};

// Runs `/bin/sh -c command` to completion and captures its output.
CommandResult run_shell(const std::string& command,
                        const std::filesystem::path& cwd = {});

// Quotes `text` for safe interpolation into a POSIX shell command line.
std::string shell_quote(const std::string& text);

// A child process with line-oriented pipes on stdin/stdout. stderr is
// inherited. Destroying a running Subprocess kills and reaps it.
class Subprocess {
 public:
  Subprocess(const std::vector<std::string>& argv,
             const std::filesystem::path& cwd = {});
  ~Subprocess();
  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  // Returns false if the child closed its stdin.
  bool write_line(const std::string& line);
  // Next line without the trailing newline. nullopt when the deadline passes;
  // throws IoError when the child closes stdout.
  std::optional<std::string> read_line(
      std::chrono::steady_clock::time_point deadline);

  void close_stdin();
  // Waits up to `grace` for a voluntary exit, then SIGKILLs. Returns the exit
  // status (128 + signal for signalled children).
  int terminate(std::chrono::milliseconds grace = std::chrono::milliseconds(0));
  bool running() const { return pid_ > 0; }
  pid_t pid() const { return pid_; }

 private:
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

}  // namespace recast

#endif  // RECAST_PROCESS_H_
