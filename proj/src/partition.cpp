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

#include "mlschur/partition.hpp"

#include <cmath>
#include <string>

namespace mlschur {

namespace {

std::vector<Index> uniform_aggregation(Index fine, Index coarse) {
  const Index width = fine / coarse;
  std::vector<Index> agg(coarse + 1);
  for (Index i = 0; i < coarse; ++i) agg[i] = i * width;
  agg[coarse] = fine;
  return agg;
}

}  // namespace

std::vector<double> uniform_grid(double t_end, Index n) {
  std::vector<double> grid(n + 1);
  for (Index i = 0; i < n; ++i) grid[i] = t_end * (static_cast<double>(i) / static_cast<double>(n));
  grid[n] = t_end;
  return grid;
}

MultilevelPartition::MultilevelPartition(std::vector<double> fine_grid, std::span<const Index> counts) {
  if (counts.empty()) throw ValidationError("partition needs at least one level");
  if (fine_grid.size() < 2) throw ValidationError("fine grid needs at least two points");
  if (counts[0] != fine_grid.size() - 1)
    throw ValidationError("level-0 count " + std::to_string(counts[0]) + " does not match grid with " +
                          std::to_string(fine_grid.size() - 1) + " elements");
  if (fine_grid.front() != 0.0) throw ValidationError("fine grid must start at t = 0");
  for (Index i = 1; i < fine_grid.size(); ++i)
    if (!(fine_grid[i] > fine_grid[i - 1])) throw ValidationError("fine grid must be strictly increasing");

  grids_.push_back(std::move(fine_grid));
  agg_.emplace_back();
  fine_index_.emplace_back(grids_[0].size());
  for (Index i = 0; i < grids_[0].size(); ++i) fine_index_[0][i] = i;

  for (Index k = 1; k < counts.size(); ++k) {
    if (counts[k] < 1 || counts[k] > counts[k - 1])
      throw ValidationError("level " + std::to_string(k) + " count " + std::to_string(counts[k]) +
                            " must lie in [1, " + std::to_string(counts[k - 1]) + "]");
    auto agg = uniform_aggregation(counts[k - 1], counts[k]);
    std::vector<double> grid(agg.size());
    std::vector<Index> fine(agg.size());
    for (Index i = 0; i < agg.size(); ++i) {
      grid[i] = grids_[k - 1][agg[i]];
      fine[i] = fine_index_[k - 1][agg[i]];
    }
    grids_.push_back(std::move(grid));
    agg_.push_back(std::move(agg));
    fine_index_.push_back(std::move(fine));
  }
}

std::vector<Index> MultilevelPartition::counts() const {
  std::vector<Index> out;
  for (const auto& g : grids_) out.push_back(g.size() - 1);
  return out;
}

std::span<const Index> MultilevelPartition::aggregation(Index level) const {
  if (level == 0 || level >= agg_.size()) throw std::out_of_range("no aggregation map for level " + std::to_string(level));
  return agg_[level];
}

MultilevelPartition build_from_counts(double t_end, std::span<const Index> counts) {
  if (!(t_end > 0.0)) throw ValidationError("t_end must be positive");
  if (counts.empty() || counts[0] == 0) throw ValidationError("level-0 element count must be positive");
  return MultilevelPartition(uniform_grid(t_end, counts[0]), counts);
}

MultilevelPartition build_uniform(double t_end, Index n0, Index ratio, std::optional<Index> max_levels) {
  if (!(t_end > 0.0)) throw ValidationError("t_end must be positive");
  if (n0 == 0) throw ValidationError("n0 must be positive");
  if (ratio < 2) throw ValidationError("coarsening ratio must be at least 2");
  if (max_levels && *max_levels == 0) throw ValidationError("max_levels must be positive");

  std::vector<Index> counts{n0};
  while (counts.back() > 1 && (!max_levels || counts.size() < *max_levels))
    counts.push_back(std::max<Index>(1, counts.back() / ratio));
  return build_from_counts(t_end, counts);
}

MultilevelPartition build_adaptive_top(const MultilevelPartition& partition) {
  if (partition.num_levels() < 2) throw ValidationError("adaptive coarsening needs at least two levels");
  auto counts = partition.counts();
  const Index prev = counts[counts.size() - 2];
  counts.back() = std::max<Index>(1, static_cast<Index>(std::llround(std::sqrt(static_cast<double>(prev)))));
  std::vector<double> fine(partition.grid(0).begin(), partition.grid(0).end());
  return MultilevelPartition(std::move(fine), counts);
}

}  // namespace mlschur
