// Copyright (c) 2026 The clstx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <stdexcept>
#include <string>

namespace clstx {

/// Root of every error raised by the library. `kind()` is a stable,
/// machine-parseable tag used by the CLI when reporting failures.
class Error : public std::runtime_error {
 public:
  Error(const char* kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  const char* kind() const noexcept { return kind_; }

 private:
  const char* kind_;
};

#define CLSTX_DEFINE_ERROR(Name, tag)                                   \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(tag, what) {}        \
  }

CLSTX_DEFINE_ERROR(DimensionError, "dimension");
CLSTX_DEFINE_ERROR(InvalidArgument, "invalid-argument");
CLSTX_DEFINE_ERROR(ConfigError, "config");
CLSTX_DEFINE_ERROR(NumericError, "numeric");
CLSTX_DEFINE_ERROR(IoError, "io");
CLSTX_DEFINE_ERROR(FormatError, "format");
CLSTX_DEFINE_ERROR(CorruptionError, "corruption");
CLSTX_DEFINE_ERROR(ValidationError, "validation");
CLSTX_DEFINE_ERROR(TrainingError, "training");

#undef CLSTX_DEFINE_ERROR

}  // namespace clstx
