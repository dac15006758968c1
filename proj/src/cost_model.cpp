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

#include "mlschur/cost_model.hpp"

#include <cmath>

namespace mlschur {

CostEstimate cost_model(Index n0, double ratio, Index levels, Index m_unk) {
  if (levels == 0) throw ValidationError("cost model needs at least one level");
  const double m = static_cast<double>(m_unk);
  const double per_step = m * m + m;
  const double ell = static_cast<double>(levels - 1);

  CostEstimate c;
  c.levels = levels;
  c.ratio = ratio;
  c.flop_sequential = static_cast<double>(n0) * per_step;
  c.cpu_sequential = c.flop_sequential;
  if (levels == 1) {
    c.flop_parallel = c.flop_sequential;
    c.cpu_parallel = c.cpu_sequential;
    c.processors = 1.0;
    c.speedup = 1.0;
    return c;
  }
  c.processors = static_cast<double>(n0) / ratio;
  c.flop_parallel = c.flop_sequential * (1.0 + m) * (1.0 - std::pow(ratio, -(ell + 1.0))) / (1.0 - 1.0 / ratio);
  c.cpu_parallel = ell * ratio * per_step * (1.0 + m);
  c.speedup = c.processors / (ell * (1.0 + m));
  return c;
}

CostEstimate cost_model(const MultilevelPartition& partition, Index m_unk) {
  const Index n0 = partition.elements(0);
  if (partition.num_levels() == 1) return cost_model(n0, static_cast<double>(n0), 1, m_unk);
  const double ratio = static_cast<double>(n0) / static_cast<double>(partition.elements(1));
  return cost_model(n0, ratio, partition.num_levels(), m_unk);
}

}  // namespace mlschur
