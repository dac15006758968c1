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

#include "mlschur/integrators.hpp"

#include <cmath>
#include <charconv>
#include <sstream>

namespace mlschur {

Scheme Scheme::theta_method(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw ValidationError("theta must lie in [0, 1]");
  return {Kind::theta, theta, 0};
}

Scheme Scheme::dg(int order) {
  if (order < 0 || order > 2) throw ValidationError("DG order must be 0, 1 or 2");
  return {Kind::dg, 1.0, order};
}

Scheme Scheme::parse(std::string_view text) {
  if (text == "be") return backward_euler();
  if (text == "dg0") return dg(0);
  if (text == "dg1") return dg(1);
  if (text == "dg2") return dg(2);
  if (text.starts_with("theta:")) {
    const std::string value(text.substr(6));
    std::size_t used = 0;
    double theta = 0.0;
    try {
      theta = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) throw ValidationError("bad theta value '" + value + "'");
    return theta_method(theta);
  }
  throw ValidationError("unknown scheme '" + std::string(text) + "' (expected be, theta:<v>, dg0, dg1, dg2)");
}

std::string Scheme::name() const {
  if (kind == Kind::dg) return "dg" + std::to_string(order);
  if (theta == 1.0) return "be";
  std::ostringstream os;
  os << "theta:" << theta;
  return os.str();
}

std::vector<double> radau_nodes(int order) {
  switch (order) {
    case 0: return {1.0};
    case 1: return {1.0 / 3.0, 1.0};
    case 2: {
      const double r6 = std::sqrt(6.0);
      return {(4.0 - r6) / 10.0, (4.0 + r6) / 10.0, 1.0};
    }
    default: throw ValidationError("DG order must be 0, 1 or 2");
  }
}

std::vector<double> radau_weights(int order) {
  switch (order) {
    case 0: return {1.0};
    case 1: return {0.75, 0.25};
    case 2: {
      const double r6 = std::sqrt(6.0);
      return {(16.0 - r6) / 36.0, (16.0 + r6) / 36.0, 1.0 / 9.0};
    }
    default: throw ValidationError("DG order must be 0, 1 or 2");
  }
}

namespace {

double lagrange(const std::vector<double>& nodes, Index j, double x) {
  double v = 1.0;
  for (Index k = 0; k < nodes.size(); ++k)
    if (k != j) v *= (x - nodes[k]) / (nodes[j] - nodes[k]);
  return v;
}

double lagrange_derivative(const std::vector<double>& nodes, Index j, double x) {
  double sum = 0.0;
  for (Index l = 0; l < nodes.size(); ++l) {
    if (l == j) continue;
    double term = 1.0 / (nodes[j] - nodes[l]);
    for (Index k = 0; k < nodes.size(); ++k)
      if (k != j && k != l) term *= (x - nodes[k]) / (nodes[j] - nodes[k]);
    sum += term;
  }
  return sum;
}

Eigen::FullPivLU<Matrix> factor_or_throw(const Matrix& m, Index element, const char* what) {
  Eigen::FullPivLU<Matrix> lu(m);
  if (!lu.isInvertible()) throw SingularStepError(element, what);
  return lu;
}

}  // namespace

ElementSystem assemble_dg_element(const OdeProblem& problem, double t_start, double t_end, int order) {
  const auto nodes = radau_nodes(order);
  const auto weights = radau_weights(order);
  const Index q = nodes.size();
  const Index m = problem.size;
  const double dt = t_end - t_start;
  const Matrix id = Matrix::Identity(m, m);

  ElementSystem sys;
  sys.stages = q;
  sys.size = m;
  sys.matrix = Matrix::Zero(q * m, q * m);
  sys.inflow = Matrix::Zero(q * m, m);
  sys.rhs = Vector::Zero(q * m);
  for (Index i = 0; i < q; ++i) {
    const double ti = t_start + dt * nodes[i];
    const double li0 = lagrange(nodes, i, 0.0);
    for (Index j = 0; j < q; ++j) {
      const double coupling = weights[i] * lagrange_derivative(nodes, j, nodes[i]) + lagrange(nodes, j, 0.0) * li0;
      sys.matrix.block(i * m, j * m, m, m) = coupling * id;
    }
    sys.matrix.block(i * m, i * m, m, m) += (dt * weights[i]) * problem.linear_operator(ti);
    sys.inflow.block(i * m, 0, m, m) = li0 * id;
    sys.rhs.segment(i * m, m) = (dt * weights[i]) * problem.linear_forcing(ti);
  }
  return sys;
}

AffinePropagator condense_dg_element(const ElementSystem& sys, Index keep, std::optional<Index> element) {
  const Index m = sys.size;
  const Index q = sys.stages;
  if (keep >= q) throw ValidationError("kept stage out of range");
  if (static_cast<Index>(sys.matrix.rows()) != q * m || sys.matrix.rows() != sys.matrix.cols())
    throw ValidationError("element system must be square with stages * size rows");
  const Index id = element.value_or(0);

  if (q == 1) {
    const auto lu = factor_or_throw(sys.matrix, id, "element matrix");
    return {lu.solve(sys.inflow), lu.solve(sys.rhs)};
  }

  const Index ni = (q - 1) * m;
  Matrix s_ii(ni, ni), s_ik(ni, m), s_ki(m, ni);
  Matrix b_i(ni, m);
  Vector f_i(ni);
  auto interior_row = [&](Index stage) { return (stage < keep ? stage : stage - 1) * m; };
  for (Index a = 0; a < q; ++a) {
    if (a == keep) continue;
    const Index ra = interior_row(a);
    for (Index b = 0; b < q; ++b) {
      if (b == keep) {
        s_ik.block(ra, 0, m, m) = sys.matrix.block(a * m, b * m, m, m);
      } else {
        s_ii.block(ra, interior_row(b), m, m) = sys.matrix.block(a * m, b * m, m, m);
      }
    }
    s_ki.block(0, ra, m, m) = sys.matrix.block(keep * m, a * m, m, m);
    b_i.block(ra, 0, m, m) = sys.inflow.block(a * m, 0, m, m);
    f_i.segment(ra, m) = sys.rhs.segment(a * m, m);
  }
  const auto interior = factor_or_throw(s_ii, id, "DG interior block");
  const Matrix s_kk = sys.matrix.block(keep * m, keep * m, m, m);
  const Matrix schur = s_kk - s_ki * interior.solve(s_ik);
  const Matrix inflow = sys.inflow.block(keep * m, 0, m, m) - s_ki * interior.solve(b_i);
  const Vector rhs = sys.rhs.segment(keep * m, m) - s_ki * interior.solve(f_i);
  const auto lu = factor_or_throw(schur, id, "condensed DG block");
  return {lu.solve(inflow), lu.solve(rhs)};
}

Matrix element_stage_values(const ElementSystem& sys, const Vector& u_in) {
  Eigen::FullPivLU<Matrix> lu(sys.matrix);
  if (!lu.isInvertible()) throw SingularStepError(0, "element matrix");
  const Vector stacked = lu.solve(sys.inflow * u_in + sys.rhs);
  return stacked.reshaped(static_cast<Eigen::Index>(sys.size), static_cast<Eigen::Index>(sys.stages));
}

AffinePropagator linear_propagator(const OdeProblem& problem, double t_start, double t_end, const Scheme& scheme,
                                   std::optional<Index> element) {
  if (!problem.is_linear) throw ValidationError("linear_propagator requires a linear problem");
  if (!(t_end > t_start)) throw ValidationError("element must have positive width");
  if (scheme.kind == Scheme::Kind::dg)
    return condense_dg_element(assemble_dg_element(problem, t_start, t_end, scheme.order), scheme.order, element);

  const Index m = problem.size;
  const double dt = t_end - t_start;
  const double th = scheme.theta;
  const Matrix id = Matrix::Identity(m, m);
  const Matrix step = id + (th * dt) * problem.linear_operator(t_end);
  const auto lu = factor_or_throw(step, element.value_or(0), "I + theta dt A");
  Matrix explicit_part = id;
  Vector forcing = th * problem.linear_forcing(t_end);
  if (th != 1.0) {
    explicit_part -= ((1.0 - th) * dt) * problem.linear_operator(t_start);
    forcing += (1.0 - th) * problem.linear_forcing(t_start);
  }
  return {lu.solve(explicit_part), lu.solve(Vector(dt * forcing))};
}

std::vector<AffinePropagator> linear_propagators(const OdeProblem& problem, std::span<const double> grid,
                                                 const Scheme& scheme) {
  if (grid.size() < 2) throw ValidationError("grid needs at least one element");
  std::vector<AffinePropagator> props;
  props.reserve(grid.size() - 1);
  if (!problem.autonomous || scheme.kind != Scheme::Kind::theta) {
    for (Index j = 0; j + 1 < grid.size(); ++j) props.push_back(linear_propagator(problem, grid[j], grid[j + 1], scheme, j));
    return props;
  }

  if (!problem.is_linear) throw ValidationError("linear_propagators requires a linear problem");
  const Index m = problem.size;
  const double th = scheme.theta;
  const Matrix id = Matrix::Identity(m, m);
  std::optional<Eigen::FullPivLU<Matrix>> lu;
  Matrix phi;
  double cached_dt = 0.0;
  for (Index j = 0; j + 1 < grid.size(); ++j) {
    const double t0 = grid[j];
    const double t1 = grid[j + 1];
    if (!(t1 > t0)) throw ValidationError("element must have positive width");
    const double dt = t1 - t0;
    if (!lu || dt != cached_dt) {
      const Matrix step = id + (th * dt) * problem.linear_operator(t1);
      lu = factor_or_throw(step, j, "I + theta dt A");
      Matrix explicit_part = id;
      if (th != 1.0) explicit_part -= ((1.0 - th) * dt) * problem.linear_operator(t0);
      phi = lu->solve(explicit_part);
      cached_dt = dt;
    }
    Vector forcing = th * problem.linear_forcing(t1);
    if (th != 1.0) forcing += (1.0 - th) * problem.linear_forcing(t0);
    props.push_back({phi, lu->solve(Vector(dt * forcing))});
  }
  return props;
}

Vector step_residual(const OdeProblem& problem, double t_start, double t_end, const Vector& u_in,
                     const Vector& u_out, const Scheme& scheme) {
  if (!scheme.supports_nonlinear()) throw ValidationError("scheme " + scheme.name() + " has no one-step residual");
  const double dt = t_end - t_start;
  const double th = scheme.kind == Scheme::Kind::dg ? 1.0 : scheme.theta;
  Vector r = u_out - u_in + (dt * th) * problem.kappa(t_end, u_out);
  if (th != 1.0) r += (dt * (1.0 - th)) * problem.kappa(t_start, u_in);
  return r;
}

StepLinearization nonlinear_step_residual(const OdeProblem& problem, double t_start, double t_end,
                                          const Vector& u_in, const Vector& u_out, const Scheme& scheme,
                                          Linearization mode) {
  if (!scheme.supports_nonlinear()) throw ValidationError("scheme " + scheme.name() + " has no one-step residual");
  if (mode == Linearization::picard && !problem.has_picard())
    throw ValidationError("problem " + problem.name + " has no Picard splitting");
  const Index m = problem.size;
  const double dt = t_end - t_start;
  const double th = scheme.kind == Scheme::Kind::dg ? 1.0 : scheme.theta;
  auto derivative = [&](double t, const Vector& u) -> Matrix {
    return mode == Linearization::newton ? problem.jacobian(t, u) : problem.picard(t, u).matrix;
  };
  const Matrix id = Matrix::Identity(m, m);

  StepLinearization out;
  out.residual = step_residual(problem, t_start, t_end, u_in, u_out, scheme);
  out.d_out = id + (dt * th) * derivative(t_end, u_out);
  out.d_in = -id;
  if (th != 1.0) out.d_in += (dt * (1.0 - th)) * derivative(t_start, u_in);
  return out;
}

AffinePropagator linearized_propagator(const StepLinearization& step, Index element) {
  const auto lu = factor_or_throw(step.d_out, element, "linearized step");
  return {-lu.solve(step.d_in), -lu.solve(step.residual)};
}

}  // namespace mlschur
