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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "mlschur/bench.hpp"

namespace mlschur {

namespace {

std::vector<OdeProblem> linear_suite() {
  std::vector<OdeProblem> out{linear_decay(0.1), linear_decay(1.0), linear_decay(10.0)};
  const Index sizes[] = {1, 2, 4};
  for (Index m : sizes) out.push_back(random_stable_linear(m, 1000 + m));
  return out;
}

CheckResult make(const std::string& name, double measured, double threshold, std::string detail = {}) {
  return {name, std::isfinite(measured) && measured <= threshold, measured, threshold, std::move(detail)};
}

CheckResult failed(const std::string& name, double threshold, const std::exception& e) {
  return {name, false, std::numeric_limits<double>::quiet_NaN(), threshold, e.what()};
}

double block_difference(const LevelSystem& a, const LevelSystem& b) {
  if (a.elements() != b.elements()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (Index i = 0; i < a.elements(); ++i) {
    d = std::max(d, (a.props[i].phi - b.props[i].phi).cwiseAbs().maxCoeff());
    d = std::max(d, (a.props[i].g - b.props[i].g).cwiseAbs().maxCoeff());
  }
  return d;
}

double max_abs_difference(const Trajectory& a, const Trajectory& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

std::vector<CheckResult> verify(const VerifyOptions& options) {
  const bool linear = options.suite == "all" || options.suite == "linear";
  const bool nonlinear = options.suite == "all" || options.suite == "nonlinear";
  if (!linear && !nonlinear)
    throw ValidationError("unknown verify suite '" + options.suite + "' (expected linear, nonlinear, all)");
  WorkerPool pool(std::max<std::size_t>(1, options.workers));
  ExecutionContext ctx{pool, nullptr};
  std::vector<CheckResult> out;

  if (linear) {
    const double tol = 1e-10;
    const auto problems = linear_suite();
    const Scheme schemes[] = {Scheme::backward_euler(), Scheme::theta_method(0.5), Scheme::dg(1), Scheme::dg(2)};
    try {
      double worst = 0.0;
      const auto part = build_uniform(1.0, 1000, 10);
      for (const auto& p : problems)
        for (const auto& s : schemes) {
          const auto sys = linear_level_system(p, part.grid(0), s);
          worst = std::max(worst, max_relative_deviation(ml_solve(sys, part, ctx), forward_substitution(sys)));
        }
      out.push_back(make("linear_exactness", worst, tol, "ml_solve vs forward substitution, n0=1000, ratio 10"));
    } catch (const std::exception& e) {
      out.push_back(failed("linear_exactness", tol, e));
    }

    try {
      double worst = 0.0;
      const std::vector<Index> two{900, 30};
      const std::vector<Index> three{900, 30, 5};
      const auto p2 = build_from_counts(2.0, two);
      const auto p3 = build_from_counts(2.0, three);
      for (const auto& p : problems) {
        const auto sys = linear_level_system(p, p2.grid(0), Scheme::backward_euler());
        worst = std::max(worst, max_relative_deviation(ml_solve(sys, p3, ctx), ml_solve(sys, p2, ctx)));
      }
      out.push_back(make("two_vs_three_levels", worst, tol));
    } catch (const std::exception& e) {
      out.push_back(failed("two_vs_three_levels", tol, e));
    }

    try {
      const SchurAssembler assemble = options.assembler ? options.assembler : SchurAssembler(assemble_schur);
      double worst = 0.0;
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Index m = 1 + seed % 5;
        const Index n0 = 10 + 2 * seed;
        const Index n1 = 2 + seed % 4;
        const auto problem = random_stable_linear(m, 77 + seed);
        const std::vector<Index> counts{n0, n1};
        const auto part = build_from_counts(1.0 + 0.1 * seed, counts);
        const auto agg = part.aggregation(1);
        const auto sys = linear_level_system(problem, part.grid(0), Scheme::backward_euler());
        const auto v = interior_correction(sys, agg);
        const auto e = extension_operator(sys, agg);
        const auto f = restriction_operator(sys, agg);
        worst = std::max(worst, block_difference(assemble(sys, v, e, agg), petrov_galerkin_assemble(sys, e, f, agg)));
      }
      out.push_back(make("petrov_galerkin", worst, 1e-12, "assemble_schur vs F K E on 20 random systems"));
    } catch (const std::exception& e) {
      out.push_back(failed("petrov_galerkin", 1e-12, e));
    }

    try {
      double worst = 0.0;
      const Index n1s[] = {2, 5, 10, 25};
      for (const auto& p : problems) {
        const auto grid = uniform_grid(3.0, 500);
        const auto sys = linear_level_system(p, grid, Scheme::backward_euler());
        const Trajectory ref = forward_substitution(sys);
        for (Index n1 : n1s) {
          const std::vector<Index> counts{500, n1};
          worst = std::max(worst, max_relative_deviation(ml_solve(sys, build_from_counts(3.0, counts), ctx), ref));
        }
      }
      out.push_back(make("partition_independence", worst, tol, "n1 in {2,5,10,25}"));
    } catch (const std::exception& e) {
      out.push_back(failed("partition_independence", tol, e));
    }
  }

  if (nonlinear) {
    const double tol = 1e-6;
    try {
      const auto problem = forced_riccati();
      const std::vector<Index> counts{200, 10};
      const auto part = build_from_counts(2.0 * std::numbers::pi, counts);
      const Scheme scheme = Scheme::dg(0);
      const LinearizationPolicy policy;
      const auto seq = sequential_nonlinear_solve(problem, part.grid(0), scheme, policy);
      const auto ns = newton_schur_solve(problem, part, scheme, policy, pool);
      const auto nl = nonlinear_schur_newton_solve(1, problem, part, scheme, policy, pool);
      const double d = std::max({max_abs_difference(seq.trajectory, ns.trajectory),
                                 max_abs_difference(seq.trajectory, nl.trajectory),
                                 max_abs_difference(ns.trajectory, nl.trajectory)});
      out.push_back(make("nonlinear_agreement", d, tol, "riccati: sequential, newton-schur, nlschur:1"));
    } catch (const std::exception& e) {
      out.push_back(failed("nonlinear_agreement", tol, e));
    }
  }
  return out;
}

std::string verify_csv(const std::vector<CheckResult>& checks) {
  std::string out = "check,status,measured,threshold,detail\n";
  for (const auto& c : checks) {
    char buf[96];
    std::snprintf(buf, sizeof buf, ",%.6e,%.1e,", c.measured, c.threshold);
    out += csv_escape(c.check) + "," + (c.passed ? "pass" : "fail") + buf + csv_escape(c.detail) + "\n";
  }
  return out;
}

}  // namespace mlschur
