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

#include <atomic>
#include <chrono>
#include <iostream>
#include <thread>

#include "doctest.h"
#include "mlschur/runtime.hpp"
#include "mlschur/schur.hpp"

using namespace mlschur;

namespace {

void spin(double seconds) {
  const auto end = std::chrono::steady_clock::now() + std::chrono::duration<double>(seconds);
  volatile double x = 0.0;
  while (std::chrono::steady_clock::now() < end) x = x + 1.0;
}

}  // namespace

TEST_CASE("every task runs exactly once on its static block") {
  for (std::size_t workers : {1u, 2u, 3u, 8u}) {
    WorkerPool pool(workers);
    for (std::size_t n : {0u, 1u, 5u, 16u, 37u}) {
      std::vector<int> hits(n, 0);
      std::vector<std::thread::id> owner(n);
      pool.run(n, [&](std::size_t t) {
        ++hits[t];
        owner[t] = std::this_thread::get_id();
      });
      for (int h : hits) CHECK(h == 1);
      // Tasks of one block share a thread; blocks are contiguous.
      auto block = [&](std::size_t t) {
        std::size_t w = 0;
        while ((w + 1) * n / workers <= t) ++w;
        return w;
      };
      for (std::size_t t = 1; t < n; ++t)
        if (block(t) == block(t - 1)) CHECK(owner[t] == owner[t - 1]);
    }
  }
}

TEST_CASE("parallel_map_level keeps task order and records timings") {
  WorkerPool pool(4);
  SolverReport report;
  ExecutionContext ctx{pool, &report};
  const auto out = parallel_map_level(ctx, 0, 10, [](std::size_t i) { return static_cast<int>(i * i); });
  for (int i = 0; i < 10; ++i) CHECK(out[i] == i * i);
  REQUIRE(report.levels.count(0) == 1);
  CHECK(report.levels[0].rank_seconds.size() == 10);
  CHECK(report.levels[0].regions == 1);
  const auto empty = parallel_map_level(ctx, 1, 0, [](std::size_t) { return 1; });
  CHECK(empty.empty());
  CHECK(report.levels[1].elapsed_seconds < 0.01);
}

TEST_CASE("failures carry the lowest failing task index") {
  WorkerPool pool(3);
  std::atomic<int> ran{0};
  try {
    pool.run(9, [&](std::size_t t) {
      ++ran;
      if (t == 7 || t == 4) throw std::runtime_error("boom " + std::to_string(t));
    });
    FAIL("expected TaskError");
  } catch (const TaskError& e) {
    CHECK(e.task() == 4);
    CHECK(std::string(e.what()).find("boom 4") != std::string::npos);
    CHECK_THROWS_AS(e.rethrow_cause(), std::runtime_error);
  }
  CHECK(ran == 9);
  // The pool stays usable.
  std::atomic<int> again{0};
  pool.run(6, [&](std::size_t) { ++again; });
  CHECK(again == 6);
}

TEST_CASE("nested regions run inline") {
  WorkerPool pool(4);
  std::vector<int> sums(4, 0);
  pool.run(4, [&](std::size_t i) {
    std::vector<int> inner(5, 0);
    pool.run(5, [&](std::size_t j) { inner[j] = static_cast<int>(i + j); });
    for (int v : inner) sums[i] += v;
  });
  for (int i = 0; i < 4; ++i) CHECK(sums[i] == 5 * i + 10);
}

TEST_CASE("extension blocks are bitwise identical for 1 and 8 workers") {
  const auto sys = linear_level_system(random_stable_linear(3, 21), uniform_grid(2.0, 400), Scheme::dg(1));
  const std::vector<Index> counts{400, 40};
  const auto part = build_from_counts(2.0, counts);
  const auto agg = part.aggregation(1);
  WorkerPool one(1);
  WorkerPool eight(8);
  const auto a = extension_operator(sys, agg, {one, nullptr});
  const auto b = extension_operator(sys, agg, {eight, nullptr});
  for (std::size_t p = 0; p < a.blocks.size(); ++p) CHECK(a.blocks[p] == b.blocks[p]);
}

TEST_CASE("timed sections accumulate") {
  SolverReport report;
  const int v = timed(&report, "outer", [&] {
    timed(&report, "level0", [] { spin(0.002); });
    return 3;
  });
  CHECK(v == 3);
  timed(&report, "level0", [] { spin(0.002); });
  CHECK(report.sections.at("level0") >= 0.004);
  CHECK(report.sections.at("outer") >= 0.002);
  timed(&report, "a", [] { spin(0.001); });
  timed(&report, "b", [] { spin(0.001); });
  CHECK(report.sections.at("a") + report.sections.at("b") >= 0.002 - 1e-4);
  CHECK_NOTHROW(timed(nullptr, "none", [] { return 0; }));
}

TEST_CASE("per-rank timing of equal tasks") {
  WorkerPool pool(available_parallelism());
  SolverReport report;
  parallel_for_level({pool, &report}, 0, 16, [](std::size_t) { spin(0.002); });
  const auto& lt = report.levels.at(0);
  CHECK(lt.max_seconds() >= 0.002);
  CHECK(lt.max_seconds() < 0.002 * 2 + 0.01);
  CHECK(lt.sum_seconds() >= 16 * 0.002);
}

TEST_CASE("16 equal tasks on 4 workers take about 4 task times") {
  if (available_parallelism() < 4) {
    MESSAGE("skipped: needs 4 cores, have " << available_parallelism());
    return;
  }
  WorkerPool pool(4);
  const auto start = std::chrono::steady_clock::now();
  pool.run(16, [](std::size_t) { spin(0.01); });
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(elapsed < 2 * 4 * 0.01);
}
