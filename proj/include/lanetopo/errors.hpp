// Copyright 2026 The lanetopo Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef LANETOPO_ERRORS_HPP_
#define LANETOPO_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace lanetopo {

// Argument outside the mathematical domain of an operation (t outside [0,1],
// NaN cost entries, mismatched control-point counts, ...).
using DomainError = std::domain_error;

// Malformed input bytes. `line` is 1-based, 0 when not line-oriented.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Well-formed record violating a record invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user configuration (split fractions, empty training set, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inputs that are individually valid but inconsistent with each other,
// e.g. prediction and ground-truth files covering different scenes.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure during optimization.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, int epoch, std::size_t scene)
      : std::runtime_error(what + " (epoch " + std::to_string(epoch) + ", scene " +
                           std::to_string(scene) + ")"),
        epoch_(epoch),
        scene_(scene) {}
  int epoch() const { return epoch_; }
  std::size_t scene() const { return scene_; }

 private:
  int epoch_;
  std::size_t scene_;
};

}  // namespace lanetopo

#endif  // LANETOPO_ERRORS_HPP_
