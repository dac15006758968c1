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

#include "doctest.h"
#include "mlschur/partition.hpp"

using namespace mlschur;

namespace {

void check_invariants(const MultilevelPartition& p) {
  REQUIRE(p.grid(0).size() == p.elements(0) + 1);
  CHECK(p.grid(0).front() == 0.0);
  for (Index k = 1; k < p.num_levels(); ++k) {
    const auto agg = p.aggregation(k);
    REQUIRE(agg.size() == p.elements(k) + 1);
    CHECK(agg.front() == 0);
    CHECK(agg.back() == p.elements(k - 1));
    for (std::size_t i = 1; i < agg.size(); ++i) CHECK(agg[i] > agg[i - 1]);
    // Brute-force nestedness: each coarse point is bitwise present one level down.
    const auto fine = p.grid(k - 1);
    for (double t : p.grid(k)) CHECK(std::find(fine.begin(), fine.end(), t) != fine.end());
  }
}

}  // namespace

TEST_CASE("build_uniform coarsens to a single element") {
  const auto p = build_uniform(1.0, 8, 2);
  CHECK(p.counts() == std::vector<Index>{8, 4, 2, 1});
  CHECK(p.top_level() == 3);
  check_invariants(p);
  CHECK(p.t_end() == 1.0);
}

TEST_CASE("build_uniform degenerate single element") {
  const auto p = build_uniform(1.0, 1, 2);
  CHECK(p.counts() == std::vector<Index>{1});
  CHECK(p.num_levels() == 1);
}

TEST_CASE("build_uniform with max_levels") {
  const auto p = build_uniform(3.0, 100, 10, 2);
  CHECK(p.counts() == std::vector<Index>{100, 10});
  check_invariants(p);
  const auto agg = p.aggregation(1);
  for (Index i = 0; i <= 10; ++i) CHECK(agg[i] == 10 * i);
  for (Index i = 0; i <= 10; ++i) CHECK(p.grid(1)[i] == p.grid(0)[10 * i]);
  CHECK(p.to_fine(1, 3) == 30);
}

TEST_CASE("build_uniform n0=10^4 ratio 100 gives three levels") {
  const auto p = build_uniform(1.0, 10000, 100);
  CHECK(p.counts() == std::vector<Index>{10000, 100, 1});
  check_invariants(p);
}

TEST_CASE("build_uniform rejects bad input") {
  CHECK_THROWS_AS(build_uniform(1.0, 0, 2), ValidationError);
  CHECK_THROWS_AS(build_uniform(1.0, 8, 1), ValidationError);
  CHECK_THROWS_AS(build_uniform(0.0, 8, 2), ValidationError);
  CHECK_THROWS_AS(build_uniform(-1.0, 8, 2), ValidationError);
}

TEST_CASE("remainder goes to the last subdomain") {
  const std::vector<Index> counts{23, 5};
  const auto p = build_from_counts(1.0, counts);
  const auto agg = p.aggregation(1);
  CHECK(std::vector<Index>(agg.begin(), agg.end()) == std::vector<Index>{0, 4, 8, 12, 16, 23});
  check_invariants(p);
}

TEST_CASE("build_from_counts rejects increasing counts") {
  const std::vector<Index> counts{10, 20};
  CHECK_THROWS_AS(build_from_counts(1.0, counts), ValidationError);
}

TEST_CASE("adaptive top level") {
  SUBCASE("n1=100") {
    const std::vector<Index> counts{1000, 100, 10};
    const auto p = build_adaptive_top(build_from_counts(1.0, counts));
    CHECK(p.elements(2) == 10);
    CHECK(p.elements(1) / p.elements(2) == 10);
  }
  SUBCASE("n1=4") {
    const std::vector<Index> counts{40, 4, 1};
    CHECK(build_adaptive_top(build_from_counts(1.0, counts)).elements(2) == 2);
  }
  SUBCASE("n1=50") {
    const std::vector<Index> counts{500, 50, 5};
    const auto p = build_adaptive_top(build_from_counts(1.0, counts));
    CHECK(p.elements(2) == 7);
    const auto agg = p.aggregation(2);
    Index total = 0;
    for (std::size_t i = 1; i < agg.size(); ++i) total += agg[i] - agg[i - 1];
    CHECK(total == 50);
    CHECK(agg[7] - agg[6] == 8);
    check_invariants(p);
  }
}

TEST_CASE("user grid is kept bitwise") {
  std::vector<double> grid{0.0, 0.1, 0.35, 0.6, 1.0};
  const std::vector<Index> counts{4, 2};
  MultilevelPartition p(grid, counts);
  CHECK(p.grid(1)[1] == 0.35);
  CHECK_THROWS_AS(MultilevelPartition({0.0, 0.5, 0.4}, std::vector<Index>{2}), ValidationError);
}
