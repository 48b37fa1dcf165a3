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

#include "recast/error.h"

#include <utility>

namespace recast {

DecoderError::DecoderError(int exit_code, std::string diagnostics)
    : Error("decoder exited with code " + std::to_string(exit_code) +
            (diagnostics.empty() ? "" : ": " + diagnostics)),
      exit_code_(exit_code),
      diagnostics_(std::move(diagnostics)) {}

StageError::StageError(std::string stage, std::string code,
                       const std::string& message, int block_index)
    : Error("stage '" + stage + "' failed [" + code + "]" +
            (block_index >= 0 ? " in block " + std::to_string(block_index)
                              : "") +
            ": " + message),
      stage_(std::move(stage)),
      code_(std::move(code)),
      block_index_(block_index) {}

}  // namespace recast
