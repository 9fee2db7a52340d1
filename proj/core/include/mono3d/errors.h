/* Copyright 2026 The Mono3D Authors. All Rights Reserved.

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

#ifndef MONO3D_ERRORS_H_
#define MONO3D_ERRORS_H_

#include <stdexcept>
#include <string>

namespace mono3d {

// Input outside the mathematical domain of an operation (e.g. a point behind
// the camera).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed text input. `line()` is 1-based, 0 when not applicable.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " +
                                          what
                                    : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Invalid configuration (unknown class names, out-of-range settings).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor/map dimensions that do not agree.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An operation was asked to use data the input does not carry, such as 3D
// evaluation on frames stripped to 2D labels.
class MissingAnnotationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mono3d

#endif  // MONO3D_ERRORS_H_
