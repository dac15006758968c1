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
#include <cstdio>
#include <numbers>
#include <sstream>

#include "mlschur/bench.hpp"

namespace mlschur {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void add_trajectory(FigureData& fig, std::span<const double> grid, const Trajectory& u, Index row,
                    const std::string& name) {
  for (Index p = 0; p < grid.size(); ++p) fig.add(grid[p], name, u(row, p));
}

Trajectory zero_like(const Trajectory& u) { return Trajectory::Zero(u.rows(), u.cols()); }

FigureData coarse_shapes(const ExperimentSpec& spec) {
  const std::vector<Index> counts{15, 3};
  const auto part = build_from_counts(std::numbers::pi, counts);
  const auto problem = zero_operator(1);
  const Scheme scheme = spec.make_scheme();
  const auto grid = part.grid(0);
  const auto agg = part.aggregation(1);
  const auto sys = linear_level_system(problem, grid, scheme);
  const auto e = extension_operator(sys, agg);
  const auto f = restriction_operator(sys, agg);

  FigureData fig;
  fig.kind = "coarse_shapes";
  // e_(1): extension of a unit value at interface point 1.
  Trajectory unit = Trajectory::Zero(1, part.elements(1) + 1);
  unit(0, 1) = 1.0;
  const Trajectory e1 = reconstruct(InteriorCorrection{Trajectory::Zero(1, grid.size())}, e, agg, unit, 0);
  add_trajectory(fig, grid, e1, 0, "e1");
  // f_(1): backward restriction weights attached to interface point 1.
  for (Index p = 0; p < grid.size(); ++p) {
    double v = 0.0;
    if (p == agg[1])
      v = 1.0;
    else if (p >= agg[0] && p < agg[1])
      v = f.blocks[p](0, 0);
    fig.add(grid[p], "f1", v);
  }
  if (scheme.kind == Scheme::Kind::dg && scheme.order > 0) {
    const auto nodes = radau_nodes(scheme.order);
    for (Index p = agg[1]; p < agg[2]; ++p) {
      const auto el = assemble_dg_element(problem, grid[p], grid[p + 1], scheme.order);
      const Matrix stages = element_stage_values(el, e1.col(p));
      for (Index s = 0; s < nodes.size(); ++s)
        fig.add(grid[p] + nodes[s] * (grid[p + 1] - grid[p]), "e1_stages", stages(0, s));
    }
  }
  return fig;
}

FigureData decomposition() {
  const std::vector<Index> counts{500, 10};
  const auto part = build_from_counts(std::numbers::pi, counts);
  const auto problem = cosine_forcing();
  const auto grid = part.grid(0);
  const auto agg = part.aggregation(1);
  const auto sys = linear_level_system(problem, grid, Scheme::backward_euler());
  const Trajectory full = forward_substitution(sys);
  const auto setup = setup_level(sys, agg);
  const Trajectory coarse = forward_substitution(setup.coarse);
  const Trajectory coarse_part =
      reconstruct(InteriorCorrection{zero_like(setup.correction.values)}, setup.extension, agg, coarse, 0);

  FigureData fig;
  fig.kind = "decomposition";
  add_trajectory(fig, grid, full, 0, "full");
  add_trajectory(fig, grid, setup.correction.values, 0, "fine");
  add_trajectory(fig, grid, coarse_part, 0, "coarse");
  return fig;
}

FigureData lv_phase(const ExperimentSpec& spec) {
  FigureData fig;
  fig.kind = "lv_phase";
  const auto grid = uniform_grid(spec.t_end, spec.nsteps);
  const Scheme scheme = spec.make_scheme();
  const auto coupled = sequential_nonlinear_solve(lotka_volterra(spec.lv), grid, scheme, spec.policy);
  add_trajectory(fig, grid, coupled.trajectory, 0, "u");
  add_trajectory(fig, grid, coupled.trajectory, 1, "v");
  LotkaVolterraParams free = spec.lv;
  free.beta = 0.0;
  free.delta = 0.0;
  const auto uncoupled = forward_substitution(linear_level_system(lotka_volterra(free), grid, scheme));
  add_trajectory(fig, grid, uncoupled, 0, "u_uncoupled");
  add_trajectory(fig, grid, uncoupled, 1, "v_uncoupled");
  return fig;
}

FigureData convergence(const ExperimentSpec& spec) {
  FigureData fig;
  fig.kind = "convergence";
  const auto problem = forced_riccati();
  const Scheme scheme = spec.make_scheme();
  const std::vector<Index> counts{spec.nsteps, spec.subdomains > 0 ? spec.subdomains : 15};
  const auto part = build_from_counts(spec.t_end, counts);
  const auto grid = part.grid(0);
  WorkerPool pool(std::max<std::size_t>(1, spec.workers));

  std::optional<Trajectory> first_update;
  NonlinearOptions opts;
  opts.observer = [&](const IterationSnapshot& s) {
    fig.add(static_cast<double>(s.iteration), "residual", s.residual.norm);
    if (s.iteration == 0) first_update = s.state;
  };
  const auto res = newton_schur_solve(problem, part, scheme, spec.policy, pool, opts);
  add_trajectory(fig, grid, res.trajectory, 0, "solution");
  for (Index p = 0; p < grid.size(); ++p) fig.add(grid[p], "exact", problem.analytic(grid[p])(0));

  // Fine/coarse split of the first Newton update.
  const auto mode = spec.policy.select(global_residual(problem, grid, *first_update, scheme).norm, problem);
  const auto sys = linearize_global(problem, grid, *first_update, scheme, mode);
  const auto detail = ml_solve_detailed(sys, part);
  const auto& setup = detail.setups.front();
  const Trajectory coarse_part = reconstruct(InteriorCorrection{zero_like(setup.correction.values)}, setup.extension,
                                             part.aggregation(1), detail.solutions[1], 0);
  add_trajectory(fig, grid, detail.solutions.front(), 0, "update_full");
  add_trajectory(fig, grid, setup.correction.values, 0, "update_fine");
  add_trajectory(fig, grid, coarse_part, 0, "update_coarse");
  return fig;
}

}  // namespace

void FigureData::add(double time, const std::string& name, double v) {
  t.push_back(time);
  series.push_back(name);
  value.push_back(v);
}

std::vector<double> FigureData::values_of(const std::string& name) const {
  std::vector<double> out;
  for (std::size_t i = 0; i < series.size(); ++i)
    if (series[i] == name) out.push_back(value[i]);
  return out;
}

std::vector<double> FigureData::times_of(const std::string& name) const {
  std::vector<double> out;
  for (std::size_t i = 0; i < series.size(); ++i)
    if (series[i] == name) out.push_back(t[i]);
  return out;
}

std::string FigureData::csv() const {
  std::string out = "t,series,value\n";
  for (std::size_t i = 0; i < t.size(); ++i) out += num(t[i]) + "," + csv_escape(series[i]) + "," + num(value[i]) + "\n";
  return out;
}

FigureData figure_data(const std::string& kind, const ExperimentSpec& spec) {
  if (kind == "coarse_shapes") return coarse_shapes(spec);
  if (kind == "decomposition") return decomposition();
  if (kind == "lv_phase") return lv_phase(spec);
  if (kind == "convergence") return convergence(spec);
  throw ValidationError("unknown figure kind '" + kind + "' (expected coarse_shapes, decomposition, lv_phase, convergence)");
}

std::string plot_script(const std::string& kind, const std::string& csv_name) {
  std::ostringstream py;
  py << "# Plots " << kind << " from " << csv_name << ".\n"
     << "import csv\nimport collections\nimport matplotlib.pyplot as plt\n\n"
     << "data = collections.defaultdict(lambda: ([], []))\n"
     << "with open(" << '"' << csv_name << '"' << ") as fh:\n"
     << "    for row in csv.DictReader(fh):\n"
     << "        data[row['series']][0].append(float(row['t']))\n"
     << "        data[row['series']][1].append(float(row['value']))\n\n";
  if (kind == "lv_phase") {
    py << "fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))\n"
       << "for name in ('u', 'v', 'u_uncoupled', 'v_uncoupled'):\n"
       << "    ax1.plot(*data[name], label=name)\n"
       << "ax1.set_xlabel('t')\nax1.legend()\n"
       << "ax2.plot(data['u'][1], data['v'][1], label='coupled')\n"
       << "ax2.set_xlabel('prey u')\nax2.set_ylabel('predator v')\nax2.legend()\n";
  } else if (kind == "convergence") {
    py << "fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))\n"
       << "ax1.semilogy(*data['residual'], marker='o')\n"
       << "ax1.set_xlabel('iteration')\nax1.set_ylabel('residual')\n"
       << "for name in ('update_full', 'update_fine', 'update_coarse'):\n"
       << "    ax2.plot(*data[name], label=name)\n"
       << "ax2.set_xlabel('t')\nax2.legend()\n";
  } else {
    py << "fig, ax = plt.subplots(figsize=(6, 4))\n"
       << "for name, (t, v) in data.items():\n"
       << "    ax.step(t, v, where='pre', label=name) if name != 'e1_stages' else ax.plot(t, v, '.', label=name)\n"
       << "ax.set_xlabel('t')\nax.legend()\n";
  }
  py << "fig.tight_layout()\nfig.savefig(" << '"' << kind << ".png" << '"' << ")\n";
  return py.str();
}

void emit_figure_data(const std::string& kind, const ExperimentSpec& spec, const std::string& out) {
  const auto fig = figure_data(kind, spec);
  const std::string csv_path = out + ".csv";
  const auto slash = csv_path.find_last_of('/');
  write_text(csv_path, fig.csv());
  write_text(out + ".py", plot_script(kind, slash == std::string::npos ? csv_path : csv_path.substr(slash + 1)));
}

}  // namespace mlschur
