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

#include "mlschur/runtime.hpp"

#include <algorithm>
#include <numeric>

namespace mlschur {

namespace {
thread_local bool inside_worker = false;

std::string describe(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown exception";
  }
}
}  // namespace

std::size_t available_parallelism() { return std::max(1u, std::thread::hardware_concurrency()); }

WorkerPool::WorkerPool(std::size_t workers) : workers_(std::max<std::size_t>(1, workers)) {
  for (std::size_t w = 1; w < workers_; ++w) threads_.emplace_back([this, w] { worker_loop(w); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  start_cv_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::run_block(std::size_t worker) {
  const std::size_t begin = worker * tasks_ / workers_;
  const std::size_t end = (worker + 1) * tasks_ / workers_;
  for (std::size_t t = begin; t < end; ++t) {
    const auto start = std::chrono::steady_clock::now();
    try {
      (*body_)(t);
    } catch (...) {
      errors_[t] = std::current_exception();
    }
    if (task_seconds_)
      (*task_seconds_)[t] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
}

void WorkerPool::worker_loop(std::size_t worker) {
  inside_worker = true;
  std::uint64_t seen = 0;
  for (;;) {
    {
      std::unique_lock lock(mutex_);
      start_cv_.wait(lock, [&] { return stopping_ || generation_ != seen; });
      if (stopping_) return;
      seen = generation_;
    }
    run_block(worker);
    {
      std::lock_guard lock(mutex_);
      if (--active_ == 0) done_cv_.notify_one();
    }
  }
}

void WorkerPool::run(std::size_t n, const std::function<void(std::size_t)>& body, std::vector<double>* task_seconds) {
  if (task_seconds) task_seconds->assign(n, 0.0);
  if (n == 0) return;

  if (inside_worker || workers_ == 1 || n == 1) {
    // Inline path: same timing and error semantics as the pooled path.
    std::vector<std::exception_ptr> errors(n);
    for (std::size_t t = 0; t < n; ++t) {
      const auto start = std::chrono::steady_clock::now();
      try {
        body(t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
      if (task_seconds)
        (*task_seconds)[t] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    for (std::size_t t = 0; t < n; ++t)
      if (errors[t]) throw TaskError(t, describe(errors[t]), errors[t]);
    return;
  }

  std::lock_guard run_lock(run_mutex_);
  {
    std::lock_guard lock(mutex_);
    body_ = &body;
    tasks_ = n;
    task_seconds_ = task_seconds;
    errors_.assign(n, nullptr);
    active_ = workers_ - 1;
    ++generation_;
  }
  start_cv_.notify_all();
  const bool was_inside = inside_worker;
  inside_worker = true;
  run_block(0);
  inside_worker = was_inside;
  {
    std::unique_lock lock(mutex_);
    done_cv_.wait(lock, [&] { return active_ == 0; });
    body_ = nullptr;
  }
  for (std::size_t t = 0; t < n; ++t)
    if (errors_[t]) throw TaskError(t, describe(errors_[t]), errors_[t]);
}

double LevelTiming::max_seconds() const {
  return rank_seconds.empty() ? 0.0 : *std::max_element(rank_seconds.begin(), rank_seconds.end());
}

double LevelTiming::sum_seconds() const { return std::accumulate(rank_seconds.begin(), rank_seconds.end(), 0.0); }

void SolverReport::add_level_region(Index level, const std::vector<double>& task_seconds, double elapsed) {
  auto& lt = levels[level];
  if (lt.rank_seconds.size() < task_seconds.size()) lt.rank_seconds.resize(task_seconds.size(), 0.0);
  for (std::size_t i = 0; i < task_seconds.size(); ++i) lt.rank_seconds[i] += task_seconds[i];
  lt.elapsed_seconds += elapsed;
  ++lt.regions;
}

}  // namespace mlschur
