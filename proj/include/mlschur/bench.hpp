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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mlschur/integrators.hpp"
#include "mlschur/models.hpp"
#include "mlschur/nonlinear.hpp"
#include "mlschur/partition.hpp"
#include "mlschur/schur.hpp"

namespace mlschur {

/// Full description of one experiment. Unset partition fields are derived
/// from `nsteps` and `ratio`.
struct ExperimentSpec {
  std::string experiment = "solve";
  std::string problem = "lotka-volterra";
  LotkaVolterraParams lv{};
  double lambda = 1.0;
  double t_end = 3.0;
  Index nsteps = 2000;
  /// Level-1 element count (subdomains); 0 means derive from `ratio`.
  Index subdomains = 0;
  /// Level-2 element count; 0 means none or derived.
  Index coarse_subdomains = 0;
  /// Explicit level counts (n0, n1, ...); overrides the fields above.
  std::vector<Index> levels;
  Index ratio = 10;
  std::optional<Index> max_levels;
  bool adaptive = false;
  std::string scheme = "dg0";
  /// sequential | newton-schur | nlschur:<k> | direct
  std::string solver = "newton-schur";
  LinearizationPolicy policy{};
  std::size_t workers = 1;
  Index reps = 1;
  std::string out;

  void validate() const;
  OdeProblem make_problem() const;
  Scheme make_scheme() const;
  MultilevelPartition make_partition() const;
  /// FNV-1a 64-bit hash of the canonical spec text, as 16 hex digits.
  std::string fingerprint() const;
  std::string canonical() const;
};

/// One CSV row (one run and one level).
struct ResultRow {
  std::string experiment;
  std::string variant;
  Index n1 = 0;
  Index n0 = 0;
  Index n2 = 0;
  std::string level;
  double wall_s_max = 0.0;
  double wall_s_sum = 0.0;
  double wall_s_elapsed = 0.0;
  double outer_iters = 0.0;
  Index picard_iters = 0;
  Index newton_iters = 0;
  double residual_final = 0.0;
  std::size_t workers = 1;
  bool oversubscribed = false;
  /// ok, failed, nonconverged or invalid.
  std::string status = "ok";
  std::string message;
  std::string fingerprint;
};

std::string csv_header();
std::string csv_line(const ResultRow& row);
std::string to_csv(const std::vector<ResultRow>& rows);
/// RFC-4180 quoting when needed.
std::string csv_escape(const std::string& field);
void write_text(const std::string& path, const std::string& text);

/// Outcome of a single solve.
struct RunOutcome {
  Trajectory trajectory;
  SolverReport report;
};

/// Runs the configured solver once (linear problems may use `direct`).
RunOutcome run_solver(const ExperimentSpec& spec, const OdeProblem& problem, const MultilevelPartition& partition,
                      WorkerPool& pool);

/// Folds one repetition into `best`: wall columns keep the minimum.
void merge_repetition(std::vector<ResultRow>& best, const std::vector<ResultRow>& rep);

/// Runs `spec` `reps` times and returns one row per level plus a totals row.
/// Wall columns are the minimum over repetitions. Errors become one failed row.
std::vector<ResultRow> run_rows(const ExperimentSpec& spec, const std::string& variant);

/// For each n1, n0 = local_size * n1. Adds sequential baseline rows.
std::vector<ResultRow> run_weak_scaling(const ExperimentSpec& spec, Index local_size, const std::vector<Index>& n1_list);

/// Three-level run with levels (n0, n1, n2); n2 = round(sqrt(n1)) when adaptive.
std::vector<ResultRow> run_three_level(const ExperimentSpec& spec, bool compare_two_level);

/// Level counts actually used by run_three_level.
std::vector<Index> three_level_counts(const ExperimentSpec& spec);

/// Tidy long-format figure data.
struct FigureData {
  std::string kind;
  std::vector<double> t;
  std::vector<std::string> series;
  std::vector<double> value;

  void add(double time, const std::string& name, double v);
  std::vector<double> values_of(const std::string& name) const;
  std::vector<double> times_of(const std::string& name) const;
  std::string csv() const;
};

/// kind: coarse_shapes | decomposition | lv_phase | convergence.
FigureData figure_data(const std::string& kind, const ExperimentSpec& spec);
/// Python script plotting the CSV written next to it.
std::string plot_script(const std::string& kind, const std::string& csv_name);
/// Writes <out>.csv and <out>.py; `out` is a path prefix.
void emit_figure_data(const std::string& kind, const ExperimentSpec& spec, const std::string& out);

struct CheckResult {
  std::string check;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

using SchurAssembler = std::function<LevelSystem(const LevelSystem&, const InteriorCorrection&,
                                                 const ExtensionOperator&, std::span<const Index>)>;

struct VerifyOptions {
  /// linear | nonlinear | all
  std::string suite = "all";
  /// Replaces assemble_schur in the Petrov-Galerkin check (mutation tests).
  SchurAssembler assembler;
  std::size_t workers = 1;
};

std::vector<CheckResult> verify(const VerifyOptions& options);
std::string verify_csv(const std::vector<CheckResult>& checks);

}  // namespace mlschur
