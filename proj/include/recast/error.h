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

#ifndef RECAST_ERROR_H_
#define RECAST_ERROR_H_

#include <stdexcept>
#include <string>

namespace recast {

// Root of every error the engine raises. `kind()` is the stable name used in
// HTTP error bodies and CLI diagnostics.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define RECAST_DEFINE_ERROR(Name, Base)                          \
  class Name : public Base {                                     \
   public:                                                       \
    using Base::Base;                                            \
    const char* kind() const noexcept override { return #Name; } \
  }

RECAST_DEFINE_ERROR(IoError, Error);
RECAST_DEFINE_ERROR(ConfigError, Error);
RECAST_DEFINE_ERROR(GapError, Error);
RECAST_DEFINE_ERROR(DimensionError, Error);
RECAST_DEFINE_ERROR(LengthError, Error);
RECAST_DEFINE_ERROR(EmptyError, Error);
RECAST_DEFINE_ERROR(CorruptRleError, Error);
RECAST_DEFINE_ERROR(ParamError, Error);
RECAST_DEFINE_ERROR(PromptError, Error);
RECAST_DEFINE_ERROR(UninpaintableError, Error);
RECAST_DEFINE_ERROR(DegeneratePoseError, Error);
RECAST_DEFINE_ERROR(ProtocolError, Error);
RECAST_DEFINE_ERROR(TimeoutError, Error);
RECAST_DEFINE_ERROR(ContractViolationError, Error);
RECAST_DEFINE_ERROR(NotFoundError, Error);

#undef RECAST_DEFINE_ERROR

class DecoderError : public Error {
 public:
  DecoderError(int exit_code, std::string diagnostics);
  const char* kind() const noexcept override { return "DecoderError"; }
  int exit_code() const { return exit_code_; }
  const std::string& diagnostics() const { return diagnostics_; }

 private:
  int exit_code_;
  std::string diagnostics_;
};

// A stage (or worker) failed. Carries the stage name, and for harmonization
// the block index that failed (-1 when not applicable).
class StageError : public Error {
 public:
  StageError(std::string stage, std::string code, const std::string& message,
             int block_index = -1);
  const char* kind() const noexcept override { return "StageError"; }
  const std::string& stage() const { return stage_; }
  const std::string& code() const { return code_; }
  int block_index() const { return block_index_; }

 private:
  std::string stage_;
  std::string code_;
  int block_index_;
};

}  // namespace recast

#endif  // RECAST_ERROR_H_
