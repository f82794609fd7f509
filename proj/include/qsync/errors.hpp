// Copyright 2026 The qsync Authors
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

namespace qsync {

/// Input that violates a structural contract (dimensions, graph, density).
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Integration step exceeds the stability heuristic step * L <= 0.1.
class StepTooLargeError : public std::invalid_argument {
public:
  StepTooLargeError(double step, double max_step)
      : std::invalid_argument("integration step " + std::to_string(step) +
                              " exceeds stability bound " +
                              std::to_string(max_step)),
        step_(step), max_step_(max_step) {}

  double step() const { return step_; }
  double max_step() const { return max_step_; }

private:
  double step_;
  double max_step_;
};

/// Integrated state became non-finite.
class DivergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed experiment configuration; the message names the field.
class ConfigError : public ValidationError {
public:
  ConfigError(const std::string &field, const std::string &what)
      : ValidationError(field + ": " + what), field_(field) {}
  const std::string &field() const { return field_; }

private:
  std::string field_;
};

} // namespace qsync
