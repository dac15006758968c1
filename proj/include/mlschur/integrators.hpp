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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlschur/models.hpp"
#include "mlschur/types.hpp"

namespace mlschur {

/// u^i -> phi u^i + g: one element of a linear (or linearized) time step.
struct AffinePropagator {
  Matrix phi;
  Vector g;

  static AffinePropagator identity(Index size) {
    return {Matrix::Identity(size, size), Vector::Zero(size)};
  }
  Vector apply(const Vector& u) const { return phi * u + g; }
};

/// theta-method (theta in [0, 1]) or discontinuous Galerkin of order 0..2.
struct Scheme {
  enum class Kind { theta, dg };
  Kind kind = Kind::theta;
  double theta = 1.0;
  int order = 0;

  static Scheme backward_euler() { return {Kind::theta, 1.0, 0}; }
  static Scheme theta_method(double theta);
  static Scheme dg(int order);
  /// Accepts be, theta:<v>, dg0, dg1, dg2.
  static Scheme parse(std::string_view text);
  std::string name() const;
  /// theta-methods and DG(0) admit a one-step nonlinear residual.
  bool supports_nonlinear() const { return kind == Kind::theta || order == 0; }
};

/// Radau-right nodes on [0, 1] for DG(order); the last node is 1.
std::vector<double> radau_nodes(int order);
std::vector<double> radau_weights(int order);

/// Element system of a DG step, written as matrix * U = inflow * u_in + rhs
/// with U the stacked stage values (stage-major).
struct ElementSystem {
  Matrix matrix;
  Matrix inflow;
  Vector rhs;
  Index stages = 0;
  Index size = 0;
};

ElementSystem assemble_dg_element(const OdeProblem& problem, double t_start, double t_end, int order);

/// Statically condenses all stages but `keep_stage`; the result maps the
/// inflow value to the kept stage value.
AffinePropagator condense_dg_element(const ElementSystem& system, Index keep_stage,
                                     std::optional<Index> element = std::nullopt);

/// Recovers every stage value (columns) for a given inflow.
Matrix element_stage_values(const ElementSystem& system, const Vector& u_in);

/// Affine step map of a linear problem over (t_start, t_end).
AffinePropagator linear_propagator(const OdeProblem& problem, double t_start, double t_end, const Scheme& scheme,
                                   std::optional<Index> element = std::nullopt);

/// Propagators of every element of `grid`. Equal-width elements of an
/// autonomous problem share one step factorization (theta schemes).
std::vector<AffinePropagator> linear_propagators(const OdeProblem& problem, std::span<const double> grid,
                                                 const Scheme& scheme);

enum class Linearization { newton, picard };

/// One-step implicit relation r(u_in, u_out) = 0 and its partial derivatives.
/// With Linearization::picard the derivative blocks use the frozen Picard
/// matrices instead of the true Jacobian.
struct StepLinearization {
  Vector residual;
  Matrix d_out;
  Matrix d_in;
};

Vector step_residual(const OdeProblem& problem, double t_start, double t_end, const Vector& u_in,
                     const Vector& u_out, const Scheme& scheme);

StepLinearization nonlinear_step_residual(const OdeProblem& problem, double t_start, double t_end,
                                          const Vector& u_in, const Vector& u_out, const Scheme& scheme,
                                          Linearization mode = Linearization::newton);

/// Unit-diagonal form of a linearized step: phi = -d_out^{-1} d_in,
/// g = -d_out^{-1} residual. The update y then satisfies y_out = phi y_in + g.
AffinePropagator linearized_propagator(const StepLinearization& step, Index element);

}  // namespace mlschur
