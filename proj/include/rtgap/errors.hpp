// Copyright 2026 The rtgap Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rtgap {

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: configuration, parse failures, out-of-bounds parameters,
// domain violations. Maps to CLI exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Non-finite likelihood contributions and similar. Maps to exit code 3.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::ptrdiff_t time_index = -1)
      : Error(time_index >= 0
                  ? what + " (time index " + std::to_string(time_index) + ")"
                  : what),
        time_index_(time_index) {}

  // -1 when the failure is not tied to a time step.
  std::ptrdiff_t time_index() const noexcept { return time_index_; }

 private:
  std::ptrdiff_t time_index_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace rtgap
