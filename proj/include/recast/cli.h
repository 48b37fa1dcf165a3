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


#ifndef RECAST_CLI_H_
#define RECAST_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace recast {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitStage = 3;

// Runs one `recast` subcommand. `args` excludes the program name. Exit codes:
// 0 success, 2 usage or configuration errors, 3 stage failures, 1 anything
// else.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err);

}  // namespace recast

#endif  // RECAST_CLI_H_
