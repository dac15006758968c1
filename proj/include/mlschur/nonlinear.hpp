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

#include <functional>
#include <optional>
#include <span>

#include "mlschur/integrators.hpp"
#include "mlschur/models.hpp"
#include "mlschur/partition.hpp"
#include "mlschur/runtime.hpp"
#include "mlschur/schur.hpp"

namespace mlschur {

enum class LinearizationMode { newton, picard, hybrid };

/// Linearization choice and stopping rules. Tolerances are absolute and
/// apply to un-normalized discrete L2 norms of stacked step residuals.
struct LinearizationPolicy {
  LinearizationMode mode = LinearizationMode::hybrid;
  /// Hybrid mode: Picard while the residual norm is >= switch_norm.
  double switch_norm = 1e2;
  double tol_global = 1e-8;
  /// Level-0 local step solves.
  double tol_local = 1e-10;
  /// Nested level >= 1 local Newton loops of the nonlinear extension.
  double tol_schur = 1e-10;
  Index max_outer = 50;
  Index max_inner = 50;

  void validate() const;
  /// Falls back to Newton when the problem has no Picard splitting.
  Linearization select(double residual_norm, const OdeProblem& problem) const;
};

/// rows.col(p - 1) is the residual of the step ending at point p.
struct GlobalResidual {
  Trajectory rows;
  double norm = 0.0;
};

GlobalResidual global_residual(const OdeProblem& problem, std::span<const double> grid, const Trajectory& traj,
                               const Scheme& scheme);

/// Newton (or Picard) linearization of the global one-step relations around
/// `traj`, as a level-0 system for the update (u_init = 0).
LevelSystem linearize_global(const OdeProblem& problem, std::span<const double> grid, const Trajectory& traj,
                             const Scheme& scheme, Linearization mode);

struct IterationSnapshot {
  Index iteration = 0;
  const Trajectory& state;
  const GlobalResidual& residual;
};

using IterationObserver = std::function<void(const IterationSnapshot&)>;

struct NonlinearOptions {
  /// Defaults to u0 replicated at every time point.
  std::optional<Trajectory> initial_guess;
  /// Called at every outer iterate after its residual is known.
  IterationObserver observer;
};

struct NonlinearResult {
  Trajectory trajectory;
  SolverReport report;
};

/// Time marching with a Picard/Newton loop per step (to tol_global).
NonlinearResult sequential_nonlinear_solve(const OdeProblem& problem, std::span<const double> grid,
                                           const Scheme& scheme, const LinearizationPolicy& policy);

/// Global Newton iteration; each update is an exact multilevel Schur solve.
NonlinearResult newton_schur_solve(const OdeProblem& problem, const MultilevelPartition& partition,
                                   const Scheme& scheme, const LinearizationPolicy& policy, WorkerPool& pool,
                                   const NonlinearOptions& options = {});

/// Everything the nonlinear extension needs besides the state.
struct ExtensionSetup {
  const OdeProblem& problem;
  const MultilevelPartition& partition;
  const Scheme& scheme;
  const LinearizationPolicy& policy;
};

struct ExtensionResult {
  /// Linearized level-(level+1) block of the element, when requested.
  std::optional<AffinePropagator> block;
  /// Residual of the fine step closing the element (an interface row).
  Vector closing_residual;
  Index inner_iterations = 0;
};

/// Nonlinear harmonic extension of element `element` of level `level + 1`
/// into level `level`.
///
/// `state` is a level-0 trajectory. Values at the element's level-(level+1)
/// end points are inputs; points strictly inside the element's fine span
/// carry the warm start on entry and the extension on exit, so that every
/// fine interior row, and every level-1..level interior row, is solved. Only
/// columns strictly inside the span are written.
ExtensionResult nonlinear_harmonic_extension(const ExtensionSetup& setup, Index level, Index element,
                                             Trajectory& state,
                                             std::optional<Linearization> block_mode = std::nullopt);

/// Linearized level-(level+1) block of an element at the current state,
/// condensed recursively through levels 0..level.
AffinePropagator element_contribution(const ExtensionSetup& setup, Index level, Index element, const Trajectory& state,
                                      Linearization mode);

/// Newton iteration on the level-`level` nonlinear Schur complement.
NonlinearResult nonlinear_schur_newton_solve(Index level, const OdeProblem& problem,
                                             const MultilevelPartition& partition, const Scheme& scheme,
                                             const LinearizationPolicy& policy, WorkerPool& pool,
                                             const NonlinearOptions& options = {});

}  // namespace mlschur
