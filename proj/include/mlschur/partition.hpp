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
#include <vector>

#include "mlschur/types.hpp"

namespace mlschur {

/// Hierarchy of nested time grids over [0, t_end].
///
/// Level 0 is the fine grid with n_0 elements. Every coarser level k selects
/// points of level k-1 through the aggregation map m_k: {0..n_k} -> {0..n_{k-1}},
/// so grid(k)[i] == grid(k-1)[m_k(i)] holds bitwise. Coarse points are copied,
/// never recomputed. Immutable once built.
class MultilevelPartition {
 public:
  /// Level 0 is `fine_grid`; level k > 0 aggregates level k-1 into counts[k]
  /// uniform subdomains, the last one absorbing the remainder.
  MultilevelPartition(std::vector<double> fine_grid, std::span<const Index> counts);

  Index num_levels() const noexcept { return grids_.size(); }
  /// Index of the coarsest level.
  Index top_level() const noexcept { return grids_.size() - 1; }
  Index elements(Index level) const { return grids_.at(level).size() - 1; }
  std::vector<Index> counts() const;
  double t_end() const noexcept { return grids_.front().back(); }

  std::span<const double> grid(Index level) const { return grids_.at(level); }
  /// Aggregation map of `level` (>= 1) into level - 1.
  std::span<const Index> aggregation(Index level) const;
  /// Level-0 index of point i of `level`.
  Index to_fine(Index level, Index i) const { return fine_index_.at(level).at(i); }

 private:
  std::vector<std::vector<double>> grids_;
  std::vector<std::vector<Index>> agg_;
  std::vector<std::vector<Index>> fine_index_;
};

/// Uniform level-0 grid and a fixed coarsening ratio. Coarsens by floor
/// division until a single element remains or `max_levels` is reached.
MultilevelPartition build_uniform(double t_end, Index n0, Index ratio,
                                  std::optional<Index> max_levels = std::nullopt);

/// Uniform level-0 grid with explicit per-level element counts (non-increasing).
MultilevelPartition build_from_counts(double t_end, std::span<const Index> counts);

/// Rebalances the last coarsening so that n_top = round(sqrt(n_prev)).
MultilevelPartition build_adaptive_top(const MultilevelPartition& partition);

std::vector<double> uniform_grid(double t_end, Index n);

}  // namespace mlschur
