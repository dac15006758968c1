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

#include "mlschur/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "mlschur/runtime.hpp"

namespace mlschur {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool is_nlschur(const std::string& solver) { return solver.rfind("nlschur:", 0) == 0; }

Index nlschur_level(const std::string& solver) {
  const std::string digits = solver.substr(8);
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw ValidationError("bad solver '" + solver + "' (expected nlschur:<k>)");
  return std::stoul(digits);
}

}  // namespace

void ExperimentSpec::validate() const {
  if (reps < 1) throw ValidationError("repetitions must be >= 1");
  if (!(t_end > 0.0)) throw ValidationError("t_end must be positive");
  if (solver != "sequential" && solver != "newton-schur" && solver != "direct" && !is_nlschur(solver))
    throw ValidationError("unknown solver '" + solver + "' (expected sequential, newton-schur, nlschur:<k>, direct)");
  if (is_nlschur(solver)) nlschur_level(solver);
  policy.validate();
  make_scheme();
}

OdeProblem ExperimentSpec::make_problem() const {
  if (problem == "lotka-volterra") return lotka_volterra(lv);
  if (problem == "riccati") return forced_riccati();
  if (problem == "decay") return linear_decay(lambda);
  if (problem == "cosine") return cosine_forcing();
  if (problem == "transport") return zero_operator(1);
  throw ValidationError("unknown problem '" + problem + "' (expected lotka-volterra, riccati, decay, cosine, transport)");
}

Scheme ExperimentSpec::make_scheme() const { return Scheme::parse(scheme); }

MultilevelPartition ExperimentSpec::make_partition() const {
  std::optional<MultilevelPartition> part;
  if (!levels.empty()) {
    part.emplace(build_from_counts(t_end, levels));
  } else if (subdomains > 0) {
    std::vector<Index> counts{nsteps, subdomains};
    if (coarse_subdomains > 0) counts.push_back(coarse_subdomains);
    part.emplace(build_from_counts(t_end, counts));
  } else {
    part.emplace(build_uniform(t_end, nsteps, ratio, max_levels));
  }
  if (adaptive) return build_adaptive_top(*part);
  return std::move(*part);
}

std::string ExperimentSpec::canonical() const {
  std::ostringstream os;
  os << "problem=" << problem;
  if (problem == "lotka-volterra")
    os << ";alpha=" << num(lv.alpha) << ";beta=" << num(lv.beta) << ";gamma=" << num(lv.gamma)
       << ";delta=" << num(lv.delta) << ";u0=" << num(lv.u0) << ";v0=" << num(lv.v0);
  if (problem == "decay") os << ";lambda=" << num(lambda);
  os << ";t_end=" << num(t_end) << ";partition=";
  try {
    const auto counts = make_partition().counts();
    for (std::size_t i = 0; i < counts.size(); ++i) os << (i ? "," : "") << counts[i];
  } catch (const std::exception&) {
    os << "invalid";
  }
  os << ";scheme=" << scheme << ";solver=" << solver << ";mode=" << static_cast<int>(policy.mode)
     << ";switch=" << num(policy.switch_norm) << ";tol_global=" << num(policy.tol_global)
     << ";tol_local=" << num(policy.tol_local) << ";tol_schur=" << num(policy.tol_schur)
     << ";max_outer=" << policy.max_outer << ";max_inner=" << policy.max_inner;
  return os.str();
}

std::string ExperimentSpec::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string csv_header() {
  return "experiment,variant,n1,n0,n2,level,wall_s_max,wall_s_sum,wall_s_elapsed,outer_iters,picard_iters,"
         "newton_iters,residual_final,workers,oversubscribed,status,message,fingerprint";
}

std::string csv_line(const ResultRow& r) {
  std::ostringstream os;
  os << csv_escape(r.experiment) << ',' << csv_escape(r.variant) << ',' << r.n1 << ',' << r.n0 << ',' << r.n2 << ','
     << csv_escape(r.level) << ',' << num(r.wall_s_max) << ',' << num(r.wall_s_sum) << ',' << num(r.wall_s_elapsed)
     << ',' << num(r.outer_iters) << ',' << r.picard_iters << ',' << r.newton_iters << ',' << num(r.residual_final)
     << ',' << r.workers << ',' << (r.oversubscribed ? 1 : 0) << ',' << csv_escape(r.status) << ','
     << csv_escape(r.message) << ',' << r.fingerprint;
  return os.str();
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out = csv_header() + "\n";
  for (const auto& r : rows) out += csv_line(r) + "\n";
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

void merge_repetition(std::vector<ResultRow>& best, const std::vector<ResultRow>& rep) {
  if (best.empty()) {
    best = rep;
    return;
  }
  if (best.size() != rep.size()) throw std::logic_error("repetitions produced different row sets");
  for (std::size_t i = 0; i < best.size(); ++i) {
    best[i].wall_s_max = std::min(best[i].wall_s_max, rep[i].wall_s_max);
    best[i].wall_s_sum = std::min(best[i].wall_s_sum, rep[i].wall_s_sum);
    best[i].wall_s_elapsed = std::min(best[i].wall_s_elapsed, rep[i].wall_s_elapsed);
  }
}

RunOutcome run_solver(const ExperimentSpec& spec, const OdeProblem& problem, const MultilevelPartition& partition,
                      WorkerPool& pool) {
  const Scheme scheme = spec.make_scheme();
  const auto grid = partition.grid(0);
  RunOutcome out;
  if (spec.solver == "direct" || (spec.solver == "sequential" && problem.is_linear)) {
    if (!problem.is_linear) throw ValidationError("the direct solver needs a linear problem");
    out.report.workers = pool.workers();
    const auto start = std::chrono::steady_clock::now();
    const auto sys = timed(&out.report, "assembly", [&] { return linear_level_system(problem, grid, scheme); });
    if (spec.solver == "direct") {
      ExecutionContext ctx{pool, &out.report};
      out.trajectory = ml_solve(sys, partition, ctx);
      out.report.cost = cost_model(partition, problem.size);
    } else {
      out.trajectory = forward_substitution(sys);
      const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      out.report.add_level_region(0, {t}, t);
    }
    out.report.add_section("total", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    out.report.outer_iterations = 1;
    out.report.residual_final = global_residual(problem, grid, out.trajectory, scheme).norm;
    return out;
  }
  NonlinearResult res;
  if (spec.solver == "sequential")
    res = sequential_nonlinear_solve(problem, grid, scheme, spec.policy);
  else if (spec.solver == "newton-schur")
    res = newton_schur_solve(problem, partition, scheme, spec.policy, pool);
  else
    res = nonlinear_schur_newton_solve(nlschur_level(spec.solver), problem, partition, scheme, spec.policy, pool);
  out.trajectory = std::move(res.trajectory);
  out.report = std::move(res.report);
  return out;
}

std::vector<ResultRow> run_rows(const ExperimentSpec& spec, const std::string& variant) {
  ResultRow base;
  base.experiment = spec.experiment;
  base.variant = variant;
  base.fingerprint = spec.fingerprint();
  base.workers = std::max<std::size_t>(1, spec.workers);
  base.oversubscribed = base.workers > available_parallelism();
  try {
    spec.validate();
    const auto problem = spec.make_problem();
    const auto partition = spec.make_partition();
    base.n0 = partition.elements(0);
    base.n1 = partition.num_levels() > 1 ? partition.elements(1) : 0;
    base.n2 = partition.num_levels() > 2 ? partition.elements(2) : 0;
    WorkerPool pool(base.workers);

    std::vector<ResultRow> rows;
    for (Index rep = 0; rep < spec.reps; ++rep) {
      const auto start = std::chrono::steady_clock::now();
      const auto outcome = run_solver(spec, problem, partition, pool);
      const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      const auto& rep_report = outcome.report;

      std::vector<ResultRow> current;
      auto fill = [&](ResultRow r) {
        const bool seq = spec.solver == "sequential";
        r.outer_iters = seq ? rep_report.average_step_iterations : static_cast<double>(rep_report.outer_iterations);
        if (seq && problem.is_linear) r.outer_iters = 1.0;
        r.picard_iters = rep_report.picard_iterations;
        r.newton_iters = rep_report.newton_iterations;
        r.residual_final = rep_report.residual_final;
        return r;
      };
      for (const auto& [level, timing] : rep_report.levels) {
        ResultRow r = base;
        r.level = spec.solver == "sequential" ? "seq" : std::to_string(level);
        r.wall_s_max = timing.max_seconds();
        r.wall_s_sum = timing.sum_seconds();
        r.wall_s_elapsed = timing.elapsed_seconds;
        current.push_back(fill(r));
      }
      ResultRow t = base;
      t.level = "total";
      t.wall_s_max = t.wall_s_sum = t.wall_s_elapsed = total;
      current.push_back(fill(t));

      merge_repetition(rows, current);
    }
    return rows;
  } catch (const std::exception& e) {
    ResultRow r = base;
    r.level = "total";
    r.status = dynamic_cast<const ConvergenceError*>(&e)   ? "nonconverged"
               : dynamic_cast<const ValidationError*>(&e) ? "invalid"
                                                          : "failed";
    if (const auto* task = dynamic_cast<const TaskError*>(&e)) {
      try {
        task->rethrow_cause();
      } catch (const ConvergenceError&) {
        r.status = "nonconverged";
      } catch (...) {
      }
    }
    r.message = e.what();
    r.wall_s_max = r.wall_s_sum = r.wall_s_elapsed = std::numeric_limits<double>::quiet_NaN();
    r.residual_final = std::numeric_limits<double>::quiet_NaN();
    return {r};
  }
}

std::vector<ResultRow> run_weak_scaling(const ExperimentSpec& spec, Index local_size,
                                        const std::vector<Index>& n1_list) {
  if (local_size < 1) throw ValidationError("local problem size must be >= 1");
  if (n1_list.empty()) throw ValidationError("n1 list is empty");
  for (std::size_t i = 0; i < n1_list.size(); ++i) {
    if (n1_list[i] < 1) throw ValidationError("n1 values must be >= 1");
    if (i && n1_list[i] <= n1_list[i - 1]) throw ValidationError("n1 list must be strictly ascending");
  }
  std::vector<ResultRow> rows;
  for (Index n1 : n1_list) {
    ExperimentSpec s = spec;
    s.experiment = "weak-scaling";
    s.levels = {local_size * n1, n1};
    s.nsteps = local_size * n1;
    s.subdomains = n1;
    s.coarse_subdomains = 0;
    s.adaptive = false;
    if (spec.workers == 0) s.workers = std::min<std::size_t>(n1, available_parallelism());
    for (auto& r : run_rows(s, s.solver)) rows.push_back(std::move(r));
    ExperimentSpec seq = s;
    seq.solver = "sequential";
    for (auto& r : run_rows(seq, "sequential")) {
      if (r.status == "ok" && r.level != "total") r.level = "seq";
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

std::vector<Index> three_level_counts(const ExperimentSpec& spec) {
  std::vector<Index> c;
  if (!spec.levels.empty()) {
    c = spec.levels;
  } else {
    const Index n1 = spec.subdomains > 0 ? spec.subdomains : spec.nsteps / std::max<Index>(1, spec.ratio);
    Index n2 = spec.coarse_subdomains > 0 ? spec.coarse_subdomains : n1 / std::max<Index>(1, spec.ratio);
    c = {spec.nsteps, n1, n2};
  }
  if (c.size() != 3) throw ValidationError("three-level runs need exactly three level counts");
  if (spec.adaptive) c[2] = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(c[1]))));
  if (!(c[2] >= 1 && c[2] < c[1] && c[1] < c[0]))
    throw ValidationError("three-level counts must satisfy 1 <= n2 < n1 < n0 (got " + std::to_string(c[0]) + ", " +
                          std::to_string(c[1]) + ", " + std::to_string(c[2]) + ")");
  return c;
}

std::vector<ResultRow> run_three_level(const ExperimentSpec& spec, bool compare_two_level) {
  const auto counts = three_level_counts(spec);
  ExperimentSpec s = spec;
  s.experiment = "three-level";
  s.levels = counts;
  s.adaptive = false;
  auto rows = run_rows(s, spec.adaptive ? "three-level-adaptive" : "three-level");
  if (compare_two_level) {
    ExperimentSpec two = s;
    two.levels = {counts[0], counts[1]};
    for (auto& r : run_rows(two, "two-level")) rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace mlschur
