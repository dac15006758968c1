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

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "mlschur/cost_model.hpp"

namespace mlschur {

/// A subdomain task that threw; carries the task index.
class TaskError : public std::runtime_error {
 public:
  TaskError(std::size_t task, const std::string& what, std::exception_ptr cause)
      : std::runtime_error("task " + std::to_string(task) + ": " + what), task_(task), cause_(std::move(cause)) {}
  std::size_t task() const noexcept { return task_; }
  /// Rethrows the original exception.
  [[noreturn]] void rethrow_cause() const { std::rethrow_exception(cause_); }

 private:
  std::size_t task_;
  std::exception_ptr cause_;
};

std::size_t available_parallelism();

/// Fixed set of threads running index-parallel regions.
///
/// Worker w of W always runs the contiguous block [w n / W, (w + 1) n / W)
/// of a region with n tasks, and tasks write only to their own slots, so
/// results do not depend on W. Regions started from inside a worker run
/// inline on that worker.
class WorkerPool {
 public:
  explicit WorkerPool(std::size_t workers = available_parallelism());
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t workers() const noexcept { return workers_; }

  /// Runs body(task) for task in [0, n) and records each task's duration in
  /// `task_seconds` (resized to n). Throws TaskError for the lowest failing
  /// task index after all tasks finished.
  void run(std::size_t n, const std::function<void(std::size_t)>& body, std::vector<double>* task_seconds = nullptr);

 private:
  void worker_loop(std::size_t worker);
  void run_block(std::size_t worker);

  std::size_t workers_;
  std::vector<std::thread> threads_;
  std::mutex run_mutex_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  std::uint64_t generation_ = 0;
  std::size_t active_ = 0;
  bool stopping_ = false;
  const std::function<void(std::size_t)>* body_ = nullptr;
  std::size_t tasks_ = 0;
  std::vector<double>* task_seconds_ = nullptr;
  std::vector<std::exception_ptr> errors_;
};

/// Accumulated timing of one level.
///
/// Each task index is treated as one emulated rank (one subdomain per
/// processor), so `max_seconds` is the critical path of a one-rank-per-task
/// run and `sum_seconds` the total work. `elapsed_seconds` is the measured
/// wall-clock of the parallel regions on this machine.
struct LevelTiming {
  std::vector<double> rank_seconds;
  double elapsed_seconds = 0.0;
  std::size_t regions = 0;

  double max_seconds() const;
  double sum_seconds() const;
};

struct SolverReport {
  std::map<Index, LevelTiming> levels;
  std::map<std::string, double> sections;
  Index outer_iterations = 0;
  Index picard_iterations = 0;
  Index newton_iterations = 0;
  Index inner_iterations = 0;
  /// Sequential solvers: mean linearization iterations per time step.
  double average_step_iterations = 0.0;
  std::vector<double> residual_history;
  double residual_final = 0.0;
  std::optional<CostEstimate> cost;
  std::size_t workers = 1;

  /// Adds task durations of a region to `level` (task index == rank).
  void add_level_region(Index level, const std::vector<double>& task_seconds, double elapsed);
  void add_section(const std::string& label, double seconds) { sections[label] += seconds; }
};

/// Pool plus an optional report collecting per-level timings.
struct ExecutionContext {
  WorkerPool& pool;
  SolverReport* report = nullptr;
};

/// Runs `fn(task)` for each task index in parallel; results in task order.
template <class F>
auto parallel_map_level(ExecutionContext ctx, Index level, std::size_t n, F&& fn)
    -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<std::optional<R>> slots(n);
  std::vector<double> task_seconds;
  const auto start = std::chrono::steady_clock::now();
  ctx.pool.run(n, [&](std::size_t i) { slots[i].emplace(fn(i)); }, &task_seconds);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (ctx.report) ctx.report->add_level_region(level, task_seconds, elapsed);
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// parallel_map_level for tasks without results.
template <class F>
void parallel_for_level(ExecutionContext ctx, Index level, std::size_t n, F&& fn) {
  std::vector<double> task_seconds;
  const auto start = std::chrono::steady_clock::now();
  ctx.pool.run(n, [&](std::size_t i) { fn(i); }, &task_seconds);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (ctx.report) ctx.report->add_level_region(level, task_seconds, elapsed);
}

/// Times `thunk` into `report->sections[label]`.
template <class F>
decltype(auto) timed(SolverReport* report, const std::string& label, F&& thunk) {
  struct Guard {
    SolverReport* report;
    const std::string& label;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    ~Guard() {
      if (report)
        report->add_section(label, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
  } guard{report, label};
  return thunk();
}

}  // namespace mlschur
