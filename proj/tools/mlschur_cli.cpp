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

#include <cmath>
#include <iostream>
#include <numbers>

#include "CLI11.hpp"
#include "mlschur/bench.hpp"

using namespace mlschur;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kInvalid = 2;
constexpr int kNonconverged = 3;

struct Options {
  ExperimentSpec spec;
  std::string mode = "hybrid";
  Index max_iters = 50;
  double tol_local = 1e-10;
  std::vector<Index> n1_list{2, 4, 8};
  Index local_size = 50;
  std::string suite = "all";
  std::string kind;
  bool compare_two_level = false;
};

struct Flags {
  CLI::Option* t_end = nullptr;
  CLI::Option* nsteps = nullptr;
  CLI::Option* subdomains = nullptr;
  CLI::Option* scheme = nullptr;
  CLI::Option* solver = nullptr;
};

Flags add_spec_flags(CLI::App* app, Options& o) {
  auto& s = o.spec;
  Flags f;
  app->add_option("--problem", s.problem, "lotka-volterra | riccati | decay | cosine | transport")->capture_default_str();
  app->add_option("--alpha", s.lv.alpha)->capture_default_str();
  app->add_option("--beta", s.lv.beta)->capture_default_str();
  app->add_option("--gamma", s.lv.gamma)->capture_default_str();
  app->add_option("--delta", s.lv.delta)->capture_default_str();
  app->add_option("--u0", s.lv.u0, "initial prey")->capture_default_str();
  app->add_option("--v0", s.lv.v0, "initial predator")->capture_default_str();
  app->add_option("--lambda", s.lambda, "decay rate")->capture_default_str();
  f.t_end = app->add_option("--t-end", s.t_end)->capture_default_str();
  f.nsteps = app->add_option("--nsteps", s.nsteps, "fine elements n0")->capture_default_str();
  f.subdomains = app->add_option("--subdomains", s.subdomains, "level-1 elements n1");
  app->add_option("--coarse-subdomains", s.coarse_subdomains, "level-2 elements n2");
  app->add_option("--levels", s.levels, "explicit level counts n0,n1,...")->delimiter(',');
  app->add_option("--ratio", s.ratio, "coarsening ratio")->capture_default_str();
  app->add_flag("--adaptive", s.adaptive, "top level n = round(sqrt(n_prev))");
  f.scheme = app->add_option("--scheme", s.scheme, "be | theta:<v> | dg0 | dg1 | dg2")->capture_default_str();
  f.solver = app->add_option("--solver", s.solver, "sequential | newton-schur | nlschur:<k> | direct")
                 ->capture_default_str();
  app->add_option("--linearization", o.mode, "newton | picard | hybrid")->capture_default_str();
  app->add_option("--tol-global", s.policy.tol_global)->capture_default_str();
  app->add_option("--tol-local", o.tol_local, "local and nested Schur tolerance")->capture_default_str();
  app->add_option("--picard-switch", s.policy.switch_norm)->capture_default_str();
  app->add_option("--max-iters", o.max_iters, "outer and inner iteration limit")->capture_default_str();
  app->add_option("--workers", s.workers, "worker threads")->capture_default_str();
  app->add_option("--reps", s.reps, "repetitions (min wall time)")->capture_default_str();
  app->add_option("--out", s.out, "output path");
  return f;
}

void finalize(Options& o) {
  auto& p = o.spec.policy;
  if (o.mode == "newton")
    p.mode = LinearizationMode::newton;
  else if (o.mode == "picard")
    p.mode = LinearizationMode::picard;
  else if (o.mode == "hybrid")
    p.mode = LinearizationMode::hybrid;
  else
    throw ValidationError("unknown linearization '" + o.mode + "'");
  p.tol_local = p.tol_schur = o.tol_local;
  p.max_outer = p.max_inner = o.max_iters;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty())
    std::cout << text;
  else
    write_text(out, text);
}

int exit_for(const std::vector<ResultRow>& rows) {
  int code = kOk;
  for (const auto& r : rows) {
    if (r.status == "invalid") return kInvalid;
    if (r.status == "nonconverged") code = kNonconverged;
    if (r.status == "failed" && code == kOk) code = kFailed;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilevel Schur-complement parallel-in-time ODE solver"};
  app.require_subcommand(1);
  Options o;

  auto* solve = app.add_subcommand("solve", "run one solver configuration");
  add_spec_flags(solve, o);

  auto* weak = app.add_subcommand("weak-scaling", "fixed local size, growing n1");
  add_spec_flags(weak, o);
  weak->add_option("--n1-list", o.n1_list, "ascending n1 values")->delimiter(',')->capture_default_str();
  weak->add_option("--local-size", o.local_size, "n0 / n1")->capture_default_str();

  auto* three = app.add_subcommand("three-level", "three-level run (optionally against two levels)");
  add_spec_flags(three, o);
  three->add_flag("--compare-two-level", o.compare_two_level);

  auto* figure = app.add_subcommand("figure", "emit figure data and a plot script");
  const Flags ff = add_spec_flags(figure, o);
  figure->add_option("--kind", o.kind, "coarse_shapes | decomposition | lv_phase | convergence")->required();

  auto* check = app.add_subcommand("verify", "run the oracle suite");
  check->add_option("--suite", o.suite, "linear | nonlinear | all")->capture_default_str();
  check->add_option("--workers", o.spec.workers)->capture_default_str();
  check->add_option("--out", o.spec.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    finalize(o);
    auto& spec = o.spec;
    if (solve->parsed()) {
      spec.experiment = "solve";
      spec.validate();
      spec.make_partition();
      const auto rows = run_rows(spec, spec.solver);
      emit(to_csv(rows), spec.out);
      for (const auto& r : rows)
        if (r.status != "ok") std::cerr << "error: " << r.message << "\n";
      return exit_for(rows);
    }
    if (weak->parsed()) {
      spec.validate();
      const auto rows = run_weak_scaling(spec, o.local_size, o.n1_list);
      emit(to_csv(rows), spec.out);
      return exit_for(rows) == kInvalid ? kInvalid : kOk;
    }
    if (three->parsed()) {
      spec.validate();
      three_level_counts(spec);
      const auto rows = run_three_level(spec, o.compare_two_level);
      emit(to_csv(rows), spec.out);
      return exit_for(rows) == kInvalid ? kInvalid : kOk;
    }
    if (figure->parsed()) {
      if (o.kind == "convergence") {
        if (!ff.t_end->count()) spec.t_end = 2.0 * std::numbers::pi;
        if (!ff.nsteps->count()) spec.nsteps = 500;
        if (!ff.subdomains->count()) spec.subdomains = 15;
      }
      spec.validate();
      emit_figure_data(o.kind, spec, spec.out.empty() ? o.kind : spec.out);
      return kOk;
    }
    VerifyOptions vo;
    vo.suite = o.suite;
    vo.workers = spec.workers;
    const auto checks = verify(vo);
    emit(verify_csv(checks), spec.out);
    for (const auto& c : checks)
      if (!c.passed) return kFailed;
    return kOk;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const ConvergenceError& e) {
    std::cerr << "no convergence: " << e.what() << "\n";
    return kNonconverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
}
