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

#include "mlschur/schur.hpp"

#include <algorithm>
#include <limits>

namespace mlschur {

namespace {

void check_agg(const LevelSystem& sys, std::span<const Index> agg) {
  if (agg.size() < 2 || agg.front() != 0 || agg.back() != sys.elements())
    throw ValidationError("aggregation map does not match a level with " + std::to_string(sys.elements()) +
                          " elements");
  for (Index i = 1; i < agg.size(); ++i)
    if (agg[i] <= agg[i - 1]) throw ValidationError("aggregation map must be strictly increasing");
}

void correct_subdomain(const LevelSystem& sys, Index a, Index b, Trajectory& v) {
  const Index m = sys.size();
  v.col(a).setZero();
  Vector cur = Vector::Zero(m);
  for (Index p = a + 1; p < b; ++p) {
    const auto& s = sys.props[p - 1];
    cur = s.phi * cur + s.g;
    v.col(p) = cur;
  }
}

void extend_subdomain(const LevelSystem& sys, Index a, Index b, std::vector<Matrix>& blocks) {
  const Index m = sys.size();
  Matrix cur = Matrix::Identity(m, m);
  for (Index p = a + 1; p <= b; ++p) {
    cur = sys.props[p - 1].phi * cur;
    blocks[p] = cur;
  }
}

AffinePropagator coarse_block(const LevelSystem& sys, const Trajectory& v, const std::vector<Matrix>& blocks,
                              Index a, Index b) {
  const auto& closing = sys.props[b - 1];
  if (b - 1 == a) return {blocks[b], closing.g};
  return {blocks[b], closing.g + closing.phi * v.col(b - 1)};
}

}  // namespace

ExecutionContext serial_context() {
  static WorkerPool pool(1);
  return {pool, nullptr};
}

LevelSystem linear_level_system(const OdeProblem& problem, std::span<const double> grid, const Scheme& scheme) {
  return {0, linear_propagators(problem, grid, scheme), problem.u0};
}

Trajectory forward_substitution(const LevelSystem& sys) {
  Trajectory u(sys.size(), sys.elements() + 1);
  u.col(0) = sys.u_init;
  for (Index p = 1; p <= sys.elements(); ++p) {
    const auto& s = sys.props[p - 1];
    u.col(p) = s.phi * u.col(p - 1) + s.g;
  }
  return u;
}

InteriorCorrection interior_correction(const LevelSystem& sys, std::span<const Index> agg, ExecutionContext ctx) {
  check_agg(sys, agg);
  InteriorCorrection v{Trajectory::Zero(sys.size(), sys.elements() + 1)};
  parallel_for_level(ctx, sys.level, agg.size() - 1,
                     [&](std::size_t i) { correct_subdomain(sys, agg[i], agg[i + 1], v.values); });
  return v;
}

ExtensionOperator extension_operator(const LevelSystem& sys, std::span<const Index> agg, ExecutionContext ctx) {
  check_agg(sys, agg);
  ExtensionOperator e;
  e.blocks.resize(sys.elements() + 1);
  e.blocks[0] = Matrix::Identity(sys.size(), sys.size());
  parallel_for_level(ctx, sys.level, agg.size() - 1,
                     [&](std::size_t i) { extend_subdomain(sys, agg[i], agg[i + 1], e.blocks); });
  return e;
}

RestrictionOperator restriction_operator(const LevelSystem& sys, std::span<const Index> agg, ExecutionContext ctx) {
  check_agg(sys, agg);
  const Index m = sys.size();
  RestrictionOperator f;
  f.blocks.resize(sys.elements() + 1);
  f.blocks[sys.elements()] = Matrix::Identity(m, m);
  parallel_for_level(ctx, sys.level, agg.size() - 1, [&](std::size_t i) {
    Matrix cur = Matrix::Identity(m, m);
    for (Index p = agg[i + 1]; p-- > agg[i];) {
      cur = sys.props[p].phi.transpose() * cur;
      f.blocks[p] = cur;
    }
  });
  return f;
}

LevelSystem assemble_schur(const LevelSystem& sys, const InteriorCorrection& v, const ExtensionOperator& e,
                           std::span<const Index> agg) {
  check_agg(sys, agg);
  LevelSystem coarse{sys.level + 1, {}, sys.u_init};
  coarse.props.reserve(agg.size() - 1);
  for (Index i = 0; i + 1 < agg.size(); ++i) coarse.props.push_back(coarse_block(sys, v.values, e.blocks, agg[i], agg[i + 1]));
  return coarse;
}

CoarseBlocks petrov_galerkin_blocks(const LevelSystem& sys, const ExtensionOperator& e,
                                    const RestrictionOperator& f, std::span<const Index> agg) {
  check_agg(sys, agg);
  const Index m = sys.size();
  const Index nc = agg.size() - 1;
  const Matrix id = Matrix::Identity(m, m);
  const Matrix zero = Matrix::Zero(m, m);

  // Block (p, c) of the extension: identity at the coarse point, harmonic
  // blocks inside subdomain c, zero elsewhere.
  auto ext = [&](Index p, Index c) -> Matrix {
    if (p == agg[c]) return id;
    if (c < nc && p > agg[c] && p < agg[c + 1]) return e.blocks[p];
    return zero;
  };
  // Block (p, c) of K E.
  auto ke = [&](Index p, Index c) -> Matrix {
    if (p == 0) return ext(0, c);
    return ext(p, c) - sys.props[p - 1].phi * ext(p - 1, c);
  };
  // Block (r, p) of F: transposed restriction inside subdomain r-1 and the
  // identity at its closing point.
  auto restr = [&](Index r, Index p) -> Matrix {
    if (p == agg[r]) return id;
    if (p > agg[r - 1] && p < agg[r]) return f.blocks[p].transpose();
    return zero;
  };

  CoarseBlocks out;
  for (Index r = 1; r <= nc; ++r) {
    Matrix diag = Matrix::Zero(m, m);
    Matrix sub = Matrix::Zero(m, m);
    Vector rhs = Vector::Zero(m);
    for (Index p = agg[r - 1] + 1; p <= agg[r]; ++p) {
      const Matrix fr = restr(r, p);
      diag += fr * ke(p, r);
      sub += fr * ke(p, r - 1);
      rhs += fr * sys.props[p - 1].g;
    }
    out.diagonal.push_back(std::move(diag));
    out.subdiagonal.push_back(std::move(sub));
    out.rhs.push_back(std::move(rhs));
  }
  return out;
}

LevelSystem petrov_galerkin_assemble(const LevelSystem& sys, const ExtensionOperator& e,
                                     const RestrictionOperator& f, std::span<const Index> agg) {
  const auto blocks = petrov_galerkin_blocks(sys, e, f, agg);
  LevelSystem coarse{sys.level + 1, {}, sys.u_init};
  for (Index r = 0; r < blocks.subdiagonal.size(); ++r)
    coarse.props.push_back({-blocks.subdiagonal[r], blocks.rhs[r]});
  return coarse;
}

Trajectory reconstruct(const InteriorCorrection& v, const ExtensionOperator& e, std::span<const Index> agg,
                       const Trajectory& coarse, Index level, ExecutionContext ctx) {
  const Index n = agg.back();
  if (static_cast<Index>(coarse.cols()) != agg.size()) throw ValidationError("coarse trajectory size mismatch");
  Trajectory u(v.values.rows(), n + 1);
  parallel_for_level(ctx, level, agg.size() - 1, [&](std::size_t i) {
    const Index a = agg[i];
    const Index b = agg[i + 1];
    u.col(a) = coarse.col(i);
    for (Index p = a + 1; p < b; ++p) u.col(p) = v.values.col(p) + e.blocks[p] * coarse.col(i);
    if (b == n) u.col(n) = coarse.col(i + 1);
  });
  return u;
}

LevelSetup setup_level(const LevelSystem& sys, std::span<const Index> agg, ExecutionContext ctx) {
  check_agg(sys, agg);
  const Index m = sys.size();
  const Index nc = agg.size() - 1;
  LevelSetup s;
  s.correction.values = Trajectory::Zero(m, sys.elements() + 1);
  s.extension.blocks.resize(sys.elements() + 1);
  s.extension.blocks[0] = Matrix::Identity(m, m);
  s.coarse.level = sys.level + 1;
  s.coarse.u_init = sys.u_init;
  s.coarse.props.resize(nc);
  parallel_for_level(ctx, sys.level, nc, [&](std::size_t i) {
    correct_subdomain(sys, agg[i], agg[i + 1], s.correction.values);
    extend_subdomain(sys, agg[i], agg[i + 1], s.extension.blocks);
    s.coarse.props[i] = coarse_block(sys, s.correction.values, s.extension.blocks, agg[i], agg[i + 1]);
  });
  return s;
}

MultilevelSolution ml_solve_detailed(const LevelSystem& system, const MultilevelPartition& partition,
                                     ExecutionContext ctx) {
  const Index first = system.level;
  const Index top = partition.top_level();
  if (first > top) throw ValidationError("level system beyond the partition's top level");
  if (system.elements() != partition.elements(first))
    throw ValidationError("level system has " + std::to_string(system.elements()) + " elements, partition level " +
                          std::to_string(first) + " has " + std::to_string(partition.elements(first)));

  MultilevelSolution sol;
  sol.first_level = first;
  sol.systems.push_back(system);
  for (Index k = first; k < top; ++k) {
    sol.setups.push_back(setup_level(sol.systems.back(), partition.aggregation(k + 1), ctx));
    sol.systems.push_back(sol.setups.back().coarse);
  }

  sol.solutions.resize(top - first + 1);
  {
    Trajectory coarse;
    parallel_for_level(ctx, top, 1, [&](std::size_t) { coarse = forward_substitution(sol.systems.back()); });
    sol.solutions.back() = std::move(coarse);
  }
  for (Index k = top; k-- > first;) {
    const auto& setup = sol.setups[k - first];
    sol.solutions[k - first] = reconstruct(setup.correction, setup.extension, partition.aggregation(k + 1),
                                           sol.solutions[k - first + 1], k, ctx);
  }
  return sol;
}

Trajectory ml_solve(const LevelSystem& system, const MultilevelPartition& partition, ExecutionContext ctx) {
  auto sol = ml_solve_detailed(system, partition, ctx);
  return std::move(sol.solutions.front());
}

double max_relative_deviation(const Trajectory& x, const Trajectory& ref) {
  if (x.rows() != ref.rows() || x.cols() != ref.cols()) return std::numeric_limits<double>::infinity();
  const double scale = std::max(ref.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  return (x - ref).cwiseAbs().maxCoeff() / scale;
}

}  // namespace mlschur
