// Copyright 2026 The isnad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace isnad {

/// Failure classes. The CLI maps each one to its own exit code.
enum class ErrorKind {
  config,      // bad configuration or command line
  io,          // file system / network
  stage,       // a pipeline stage could not complete
  validation,  // a record or input violated an invariant
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// A record failed one of its type invariants. `invariant()` names it in the
/// same words the documentation uses (e.g. "char_start < char_end").
class ValidationError : public Error {
 public:
  ValidationError(std::string invariant, const std::string& detail = {})
      : Error(ErrorKind::validation,
              detail.empty() ? "invariant violated: " + invariant
                             : "invariant violated: " + invariant + " (" + detail + ")"),
        invariant_(std::move(invariant)) {}

  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

}  // namespace isnad
