// Copyright 2026 The mlschur Authors
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
#include <cstdio>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mlschur {

using Index = std::size_t;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Time-point values of a level: column p holds u^p, so a level with n
/// elements has n + 1 columns.
using Trajectory = Eigen::MatrixXd;

/// Bad user input: malformed partitions, unknown names, out-of-range flags.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An implicit step matrix that cannot be inverted.
class SingularStepError : public std::runtime_error {
 public:
  SingularStepError(Index element, const std::string& what)
      : std::runtime_error("singular step matrix at element " + std::to_string(element) + ": " + what),
        element_(element) {}
  Index element() const noexcept { return element_; }

 private:
  Index element_;
};

/// A nonlinear iteration that exhausted its budget.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& where, double residual)
      : std::runtime_error(where + " did not converge (last residual " + format(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
  }

  double residual_;
};

}  // namespace mlschur
