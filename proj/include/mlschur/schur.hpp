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

#include <span>
#include <vector>

#include "mlschur/cost_model.hpp"
#include "mlschur/integrators.hpp"
#include "mlschur/partition.hpp"
#include "mlschur/runtime.hpp"

namespace mlschur {

/// Block-bidiagonal system of one level: row 0 reads u^0 = u_init and row
/// p >= 1 reads u^p - phi_{p-1} u^{p-1} = g_{p-1}, with props[p-1] the
/// propagator of element p-1.
struct LevelSystem {
  Index level = 0;
  std::vector<AffinePropagator> props;
  Vector u_init;

  Index elements() const noexcept { return props.size(); }
  Index size() const noexcept { return static_cast<Index>(u_init.size()); }
};

LevelSystem linear_level_system(const OdeProblem& problem, std::span<const double> grid, const Scheme& scheme);

/// Sequential solve of a level system.
Trajectory forward_substitution(const LevelSystem& system);

/// Solution with zero values pinned at every interface point; its interface
/// columns are exactly zero.
struct InteriorCorrection {
  Trajectory values;
};

/// blocks[p] for p in (m(i), m(i+1)] is the response at point p to an
/// identity inflow at m(i). Interior blocks form the harmonic extension; the
/// closing block blocks[m(i+1)] is the coarse propagator of subdomain i.
/// blocks[0] is the identity.
struct ExtensionOperator {
  std::vector<Matrix> blocks;
};

/// blocks[p] for p in [m(i), m(i+1)) solves the transposed (backward) local
/// problem with an identity at m(i+1). blocks[n] is the identity.
struct RestrictionOperator {
  std::vector<Matrix> blocks;
};

ExecutionContext serial_context();

InteriorCorrection interior_correction(const LevelSystem& system, std::span<const Index> agg,
                                       ExecutionContext ctx = serial_context());
ExtensionOperator extension_operator(const LevelSystem& system, std::span<const Index> agg,
                                     ExecutionContext ctx = serial_context());
RestrictionOperator restriction_operator(const LevelSystem& system, std::span<const Index> agg,
                                         ExecutionContext ctx = serial_context());

/// Next-level system: phi_c = phi_closing e_last, g_c = g_closing + phi_closing v_last.
LevelSystem assemble_schur(const LevelSystem& system, const InteriorCorrection& v, const ExtensionOperator& e,
                           std::span<const Index> agg);

/// Diagonal and subdiagonal blocks of F K E, plus F g.
struct CoarseBlocks {
  std::vector<Matrix> diagonal;     // rows 1..n_c
  std::vector<Matrix> subdiagonal;  // rows 1..n_c
  std::vector<Vector> rhs;          // rows 1..n_c
};

CoarseBlocks petrov_galerkin_blocks(const LevelSystem& system, const ExtensionOperator& e,
                                    const RestrictionOperator& f, std::span<const Index> agg);

/// Coarse system from the Petrov-Galerkin product F K E; used to cross-check
/// assemble_schur.
LevelSystem petrov_galerkin_assemble(const LevelSystem& system, const ExtensionOperator& e,
                                     const RestrictionOperator& f, std::span<const Index> agg);

/// u = v + E u_coarse; interface values are copied from `coarse`.
Trajectory reconstruct(const InteriorCorrection& v, const ExtensionOperator& e, std::span<const Index> agg,
                       const Trajectory& coarse, Index level, ExecutionContext ctx = serial_context());

/// One level of set-up: interior correction, extension and coarse system,
/// computed subdomain-by-subdomain in a single parallel region.
struct LevelSetup {
  InteriorCorrection correction;
  ExtensionOperator extension;
  LevelSystem coarse;
};

LevelSetup setup_level(const LevelSystem& system, std::span<const Index> agg, ExecutionContext ctx = serial_context());

struct MultilevelSolution {
  Index first_level = 0;
  std::vector<LevelSystem> systems;            // levels first..top
  std::vector<LevelSetup> setups;              // levels first..top-1
  std::vector<Trajectory> solutions;           // levels first..top
};

/// Exact solve of a level system using the partition's levels from
/// system.level upwards.
MultilevelSolution ml_solve_detailed(const LevelSystem& system, const MultilevelPartition& partition,
                                     ExecutionContext ctx = serial_context());

Trajectory ml_solve(const LevelSystem& system, const MultilevelPartition& partition,
                    ExecutionContext ctx = serial_context());

/// max_p |x_p - ref_p|_inf / max(max_p |ref_p|_inf, tiny).
double max_relative_deviation(const Trajectory& x, const Trajectory& ref);

}  // namespace mlschur
