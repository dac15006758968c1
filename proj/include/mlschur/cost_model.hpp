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

#include "mlschur/partition.hpp"

namespace mlschur {

/// Operation-count model of the multilevel direct solver, in units of
/// floating-point operations per time step (communication ignored).
struct CostEstimate {
  double flop_sequential = 0.0;   // n0 (m^2 + m)
  double flop_parallel = 0.0;     // total work over all levels
  double cpu_sequential = 0.0;    // = flop_sequential
  double cpu_parallel = 0.0;      // ell theta (m^2 + m)(1 + m)
  double speedup = 1.0;           // P / (ell (1 + m))
  double processors = 1.0;        // P = n1
  double ratio = 1.0;             // theta = n0 / n1
  Index levels = 1;               // ell + 1
};

CostEstimate cost_model(Index n0, double ratio, Index levels, Index m_unk);
CostEstimate cost_model(const MultilevelPartition& partition, Index m_unk);

}  // namespace mlschur
