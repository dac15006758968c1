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

#include "mlschur/nonlinear.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace mlschur {

void LinearizationPolicy::validate() const {
  if (!(tol_global > 0.0) || !(tol_local > 0.0) || !(tol_schur > 0.0))
    throw ValidationError("tolerances must be positive");
  if (mode == LinearizationMode::hybrid && !(switch_norm > tol_global))
    throw ValidationError("hybrid switch norm must exceed the global tolerance");
  if (max_outer == 0 || max_inner == 0) throw ValidationError("iteration limits must be positive");
}

Linearization LinearizationPolicy::select(double residual_norm, const OdeProblem& problem) const {
  if (!problem.has_picard() || problem.is_linear) return Linearization::newton;
  switch (mode) {
    case LinearizationMode::newton: return Linearization::newton;
    case LinearizationMode::picard: return Linearization::picard;
    case LinearizationMode::hybrid:
      return residual_norm < switch_norm ? Linearization::newton : Linearization::picard;
  }
  return Linearization::newton;
}

namespace {

void count(SolverReport& report, Linearization mode) {
  if (mode == Linearization::newton)
    ++report.newton_iterations;
  else
    ++report.picard_iterations;
}

Trajectory initial_state(const OdeProblem& problem, Index n0, const NonlinearOptions& options) {
  if (options.initial_guess) {
    const auto& g = *options.initial_guess;
    if (static_cast<Index>(g.rows()) != problem.size || static_cast<Index>(g.cols()) != n0 + 1)
      throw ValidationError("initial guess has the wrong shape");
    Trajectory state = g;
    state.col(0) = problem.u0;
    return state;
  }
  return problem.u0.replicate(1, static_cast<Eigen::Index>(n0 + 1));
}

std::vector<Index> subdomain_bounds(const MultilevelPartition& partition) {
  if (partition.num_levels() < 2) return {0, partition.elements(0)};
  const auto agg = partition.aggregation(1);
  return {agg.begin(), agg.end()};
}

/// Solves r(u_in, u) = 0 for u starting from `guess`.
Vector solve_step(const OdeProblem& problem, double t0, double t1, const Vector& u_in, Vector u, const Scheme& scheme,
                  const LinearizationPolicy& policy, double tol, Index max_iter, Index step,
                  const std::string& where, SolverReport* report, Index& iterations) {
  auto update = [&](Linearization mode) {
    const auto lin = nonlinear_step_residual(problem, t0, t1, u_in, u, scheme, mode);
    Eigen::FullPivLU<Matrix> lu(lin.d_out);
    if (!lu.isInvertible()) throw SingularStepError(step, where);
    u -= lu.solve(lin.residual);
    ++iterations;
    if (report) count(*report, mode);
  };
  double norm = step_residual(problem, t0, t1, u_in, u, scheme).norm();
  Index it = 0;
  for (; !(norm < tol); ++it) {
    if (it == max_iter || !std::isfinite(norm)) throw ConvergenceError(where, norm);
    update(policy.select(norm, problem));
    norm = step_residual(problem, t0, t1, u_in, u, scheme).norm();
  }
  // One more update once the tolerance is met takes a nonlinear step to its
  // round-off floor, so enclosing Newton loops are not limited by it.
  if (it > 0 && !problem.is_linear) update(policy.select(norm, problem));
  return u;
}

void fill_residual(const OdeProblem& problem, std::span<const double> grid, const Trajectory& traj,
                   const Scheme& scheme, Index begin, Index end, Trajectory& rows) {
  for (Index p = begin + 1; p <= end; ++p)
    rows.col(p - 1) = step_residual(problem, grid[p - 1], grid[p], traj.col(p - 1), traj.col(p), scheme);
}

void fill_linearization(const OdeProblem& problem, std::span<const double> grid, const Trajectory& traj,
                        const Scheme& scheme, Linearization mode, Index begin, Index end,
                        std::vector<AffinePropagator>& props) {
  for (Index p = begin; p < end; ++p)
    props[p] = linearized_propagator(
        nonlinear_step_residual(problem, grid[p], grid[p + 1], traj.col(p), traj.col(p + 1), scheme, mode), p);
}

GlobalResidual parallel_residual(ExecutionContext ctx, const OdeProblem& problem, std::span<const double> grid,
                                 const Trajectory& traj, const Scheme& scheme, const std::vector<Index>& bounds) {
  GlobalResidual res;
  res.rows = Trajectory(problem.size, grid.size() - 1);
  parallel_for_level(ctx, 0, bounds.size() - 1, [&](std::size_t i) {
    fill_residual(problem, grid, traj, scheme, bounds[i], bounds[i + 1], res.rows);
  });
  res.norm = res.rows.norm();
  return res;
}

LevelSystem parallel_linearization(ExecutionContext ctx, const OdeProblem& problem, std::span<const double> grid,
                                   const Trajectory& traj, const Scheme& scheme, Linearization mode,
                                   const std::vector<Index>& bounds) {
  LevelSystem sys{0, std::vector<AffinePropagator>(grid.size() - 1), Vector::Zero(problem.size)};
  parallel_for_level(ctx, 0, bounds.size() - 1, [&](std::size_t i) {
    fill_linearization(problem, grid, traj, scheme, mode, bounds[i], bounds[i + 1], sys.props);
  });
  return sys;
}

void check_nonlinear_scheme(const Scheme& scheme) {
  if (!scheme.supports_nonlinear())
    throw ValidationError("scheme " + scheme.name() + " is not available for nonlinear solves (use be, theta:<v>, dg0)");
}

/// Linearized fine-step update over points a..b given the update at a;
/// column j holds the update at point a + j.
Trajectory linearized_sweep(const ExtensionSetup& setup, const Trajectory& state, Index a, Index b, Vector delta,
                            Linearization mode) {
  const auto grid = setup.partition.grid(0);
  Trajectory out(setup.problem.size, b - a + 1);
  out.col(0) = delta;
  for (Index p = a; p < b; ++p) {
    const auto step = linearized_propagator(nonlinear_step_residual(setup.problem, grid[p], grid[p + 1], state.col(p),
                                                                    state.col(p + 1), setup.scheme, mode),
                                            p);
    out.col(p - a + 1) = step.apply(out.col(p - a));
  }
  return out;
}

std::string element_name(Index level, Index element) {
  std::ostringstream os;
  os << "nonlinear extension (level " << level << ", element " << element << ")";
  return os.str();
}

}  // namespace

GlobalResidual global_residual(const OdeProblem& problem, std::span<const double> grid, const Trajectory& traj,
                               const Scheme& scheme) {
  const Index n = grid.size() - 1;
  if (static_cast<Index>(traj.cols()) != n + 1) throw ValidationError("trajectory does not match the grid");
  GlobalResidual res;
  res.rows = Trajectory(problem.size, n);
  fill_residual(problem, grid, traj, scheme, 0, n, res.rows);
  res.norm = res.rows.norm();
  return res;
}

LevelSystem linearize_global(const OdeProblem& problem, std::span<const double> grid, const Trajectory& traj,
                             const Scheme& scheme, Linearization mode) {
  const Index n = grid.size() - 1;
  LevelSystem sys{0, std::vector<AffinePropagator>(n), Vector::Zero(problem.size)};
  fill_linearization(problem, grid, traj, scheme, mode, 0, n, sys.props);
  return sys;
}

NonlinearResult sequential_nonlinear_solve(const OdeProblem& problem, std::span<const double> grid,
                                           const Scheme& scheme, const LinearizationPolicy& policy) {
  policy.validate();
  check_nonlinear_scheme(scheme);
  const Index n = grid.size() - 1;
  NonlinearResult out;
  out.report.workers = 1;
  out.trajectory = Trajectory(problem.size, n + 1);
  out.trajectory.col(0) = problem.u0;
  Index total = 0;
  const auto start = std::chrono::steady_clock::now();
  for (Index p = 1; p <= n; ++p) {
    const Vector u_in = out.trajectory.col(p - 1);
    out.trajectory.col(p) = solve_step(problem, grid[p - 1], grid[p], u_in, u_in, scheme, policy, policy.tol_global,
                                       policy.max_inner, p - 1, "sequential step " + std::to_string(p), &out.report,
                                       total);
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.report.add_level_region(0, {elapsed}, elapsed);
  out.report.add_section("sequential", elapsed);
  out.report.inner_iterations = total;
  out.report.average_step_iterations = n ? static_cast<double>(total) / static_cast<double>(n) : 0.0;
  out.report.residual_final = global_residual(problem, grid, out.trajectory, scheme).norm;
  out.report.residual_history = {out.report.residual_final};
  return out;
}

NonlinearResult newton_schur_solve(const OdeProblem& problem, const MultilevelPartition& partition,
                                   const Scheme& scheme, const LinearizationPolicy& policy, WorkerPool& pool,
                                   const NonlinearOptions& options) {
  policy.validate();
  check_nonlinear_scheme(scheme);
  NonlinearResult out;
  out.report.workers = pool.workers();
  out.report.cost = cost_model(partition, problem.size);
  ExecutionContext ctx{pool, &out.report};
  // Global residual and linearization are reported as sections, not as level tasks.
  const ExecutionContext untimed{pool, nullptr};
  const auto grid = partition.grid(0);
  const auto bounds = subdomain_bounds(partition);
  Trajectory state = initial_state(problem, partition.elements(0), options);

  const auto start = std::chrono::steady_clock::now();
  for (Index iter = 0;; ++iter) {
    const auto res = timed(&out.report, "residual",
                           [&] { return parallel_residual(untimed, problem, grid, state, scheme, bounds); });
    out.report.residual_history.push_back(res.norm);
    if (options.observer) options.observer({iter, state, res});
    if (res.norm < policy.tol_global) break;
    if (iter == policy.max_outer || !std::isfinite(res.norm)) throw ConvergenceError("newton-schur", res.norm);

    const auto mode = policy.select(res.norm, problem);
    const auto sys = timed(&out.report, "linearize", [&] {
      return parallel_linearization(untimed, problem, grid, state, scheme, mode, bounds);
    });
    state += ml_solve(sys, partition, ctx);
    ++out.report.outer_iterations;
    count(out.report, mode);
  }
  out.report.add_section("total", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  out.report.residual_final = out.report.residual_history.back();
  out.trajectory = std::move(state);
  return out;
}

AffinePropagator element_contribution(const ExtensionSetup& setup, Index level, Index element, const Trajectory& state,
                                      Linearization mode) {
  const auto& part = setup.partition;
  const Index m = setup.problem.size;
  Matrix e = Matrix::Identity(m, m);
  Vector w = Vector::Zero(m);
  auto chain = [&](const AffinePropagator& s) {
    e = s.phi * e;
    w = s.phi * w + s.g;
  };
  if (level == 0) {
    const auto grid = part.grid(0);
    const Index a = part.to_fine(1, element);
    const Index b = part.to_fine(1, element + 1);
    for (Index p = a; p < b; ++p)
      chain(linearized_propagator(nonlinear_step_residual(setup.problem, grid[p], grid[p + 1], state.col(p),
                                                          state.col(p + 1), setup.scheme, mode),
                                  p));
  } else {
    const auto agg = part.aggregation(level + 1);
    for (Index j = agg[element]; j < agg[element + 1]; ++j) chain(element_contribution(setup, level - 1, j, state, mode));
  }
  return {std::move(e), std::move(w)};
}

ExtensionResult nonlinear_harmonic_extension(const ExtensionSetup& setup, Index level, Index element,
                                             Trajectory& state, std::optional<Linearization> block_mode) {
  const auto& part = setup.partition;
  const auto& problem = setup.problem;
  const auto& policy = setup.policy;
  if (level + 1 >= part.num_levels()) throw ValidationError("extension level must be below the top level");
  const auto grid = part.grid(0);
  ExtensionResult out;

  if (level == 0) {
    const Index a = part.to_fine(1, element);
    const Index b = part.to_fine(1, element + 1);
    for (Index p = a + 1; p < b; ++p) {
      const Vector u_in = state.col(p - 1);
      const std::string where = element_name(level, element) + " step " + std::to_string(p);
      try {
        state.col(p) = solve_step(problem, grid[p - 1], grid[p], u_in, state.col(p), setup.scheme, policy,
                                  policy.tol_local, policy.max_inner, p - 1, where, nullptr, out.inner_iterations);
      } catch (const ConvergenceError&) {
        // A stale warm start can lie outside the basin of the step; restart from the inflow.
        state.col(p) = solve_step(problem, grid[p - 1], grid[p], u_in, u_in, setup.scheme, policy, policy.tol_local,
                                  policy.max_inner, p - 1, where, nullptr, out.inner_iterations);
      }
    }
    out.closing_residual = step_residual(problem, grid[b - 1], grid[b], state.col(b - 1), state.col(b), setup.scheme);
  } else {
    const auto agg = part.aggregation(level + 1);
    const Index q0 = agg[element];
    const Index q1 = agg[element + 1];
    for (Index it = 0;; ++it) {
      Trajectory local(problem.size, q1 - q0);
      for (Index j = q0; j < q1; ++j) {
        auto child = nonlinear_harmonic_extension(setup, level - 1, j, state);
        out.inner_iterations += child.inner_iterations;
        local.col(j - q0) = child.closing_residual;
      }
      out.closing_residual = local.col(q1 - q0 - 1);
      // Rows closing the children before the last one are interior to this element.
      const double norm = local.leftCols(q1 - q0 - 1).norm();
      if (norm < policy.tol_schur) break;
      if (it == policy.max_inner || !std::isfinite(norm)) throw ConvergenceError(element_name(level, element), norm);

      // Newton update of the interior interface values, carried to every fine
      // point of the element so the re-extension starts from the linear prediction.
      const auto mode = policy.select(norm, problem);
      const Index a = part.to_fine(level, q0);
      const Index b = part.to_fine(level, q1);
      state.middleCols(a + 1, b - a - 1) +=
          linearized_sweep(setup, state, a, b - 1, Vector::Zero(problem.size), mode).rightCols(b - a - 1);
      ++out.inner_iterations;
    }
  }
  if (block_mode) out.block = element_contribution(setup, level, element, state, *block_mode);
  return out;
}

NonlinearResult nonlinear_schur_newton_solve(Index level, const OdeProblem& problem,
                                             const MultilevelPartition& partition, const Scheme& scheme,
                                             const LinearizationPolicy& policy, WorkerPool& pool,
                                             const NonlinearOptions& options) {
  policy.validate();
  check_nonlinear_scheme(scheme);
  if (level < 1 || level > partition.top_level())
    throw ValidationError("nonlinear Schur level must lie in [1, " + std::to_string(partition.top_level()) + "]");
  NonlinearResult out;
  out.report.workers = pool.workers();
  out.report.cost = cost_model(partition, problem.size);
  ExecutionContext ctx{pool, &out.report};
  // Global residual and linearization are reported as sections, not as level tasks.
  const ExecutionContext untimed{pool, nullptr};
  const auto grid = partition.grid(0);
  const auto bounds = subdomain_bounds(partition);
  const ExtensionSetup setup{problem, partition, scheme, policy};
  const Index nk = partition.elements(level);
  Trajectory state = initial_state(problem, partition.elements(0), options);

  const auto start = std::chrono::steady_clock::now();
  for (Index iter = 0;; ++iter) {
    const auto inner = parallel_map_level(ctx, level - 1, nk, [&](std::size_t i) {
      return nonlinear_harmonic_extension(setup, level - 1, i, state).inner_iterations;
    });
    for (Index c : inner) out.report.inner_iterations += c;

    const auto res = timed(&out.report, "residual",
                           [&] { return parallel_residual(untimed, problem, grid, state, scheme, bounds); });
    out.report.residual_history.push_back(res.norm);
    if (options.observer) options.observer({iter, state, res});
    if (res.norm < policy.tol_global) break;
    if (iter == policy.max_outer || !std::isfinite(res.norm)) throw ConvergenceError("nonlinear schur-newton", res.norm);

    const auto mode = policy.select(res.norm, problem);
    LevelSystem coarse{level, {}, Vector::Zero(problem.size)};
    coarse.props = parallel_map_level(ctx, level - 1, nk, [&](std::size_t i) {
      return element_contribution(setup, level - 1, i, state, mode);
    });
    const Trajectory y = ml_solve(coarse, partition, ctx);
    // Interior fine points follow the linearized extension of the update.
    const auto interior = parallel_map_level(ctx, level - 1, nk, [&](std::size_t i) {
      const Index a = partition.to_fine(level, i);
      const Index b = partition.to_fine(level, i + 1);
      return Trajectory(linearized_sweep(setup, state, a, b - 1, y.col(i), mode).rightCols(b - a - 1));
    });
    for (Index i = 0; i < nk; ++i) {
      const Index a = partition.to_fine(level, i);
      const Index b = partition.to_fine(level, i + 1);
      state.middleCols(a + 1, b - a - 1) += interior[i];
      state.col(b) += y.col(i + 1);
    }
    ++out.report.outer_iterations;
    count(out.report, mode);
  }
  out.report.add_section("total", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  out.report.residual_final = out.report.residual_history.back();
  out.trajectory = std::move(state);
  return out;
}

}  // namespace mlschur
