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

#include "mlschur/models.hpp"

#include <cmath>
#include <random>

namespace mlschur {

OdeProblem linear_decay(double lambda) {
  OdeProblem p;
  p.name = "decay";
  p.size = 1;
  p.kappa = [lambda](double, const Vector& u) -> Vector { return lambda * u; };
  p.jacobian = [lambda](double, const Vector&) -> Matrix { return Matrix::Constant(1, 1, lambda); };
  p.picard = [lambda](double, const Vector&) {
    return PicardSplit{Matrix::Constant(1, 1, lambda), Vector::Zero(1)};
  };
  p.analytic = [lambda](double t) -> Vector { return Vector::Constant(1, std::exp(-lambda * t)); };
  p.u0 = Vector::Ones(1);
  p.is_linear = true;
  p.autonomous = true;
  return p;
}

OdeProblem forced_riccati() {
  OdeProblem p;
  p.name = "riccati";
  p.size = 1;
  p.kappa = [](double t, const Vector& u) -> Vector {
    const double s = std::sin(t);
    return Vector::Constant(1, -u[0] * u[0] - std::cos(t) + s * s);
  };
  p.jacobian = [](double, const Vector& u) -> Matrix { return Matrix::Constant(1, 1, -2.0 * u[0]); };
  p.picard = [](double t, const Vector& ubar) {
    const double s = std::sin(t);
    return PicardSplit{Matrix::Constant(1, 1, -ubar[0]), Vector::Constant(1, -std::cos(t) + s * s)};
  };
  p.analytic = [](double t) -> Vector { return Vector::Constant(1, std::sin(t)); };
  p.u0 = Vector::Zero(1);
  return p;
}

OdeProblem cosine_forcing() {
  OdeProblem p;
  p.name = "cosine";
  p.size = 1;
  p.kappa = [](double t, const Vector&) -> Vector { return Vector::Constant(1, -std::cos(t)); };
  p.jacobian = [](double, const Vector&) -> Matrix { return Matrix::Zero(1, 1); };
  p.analytic = [](double t) -> Vector { return Vector::Constant(1, std::sin(t)); };
  p.u0 = Vector::Zero(1);
  p.is_linear = true;
  p.autonomous = true;
  return p;
}

OdeProblem zero_operator(Index size) {
  OdeProblem p;
  p.name = "transport";
  p.size = size;
  p.kappa = [size](double, const Vector&) -> Vector { return Vector::Zero(size); };
  p.jacobian = [size](double, const Vector&) -> Matrix { return Matrix::Zero(size, size); };
  p.analytic = [size](double) -> Vector { return Vector::Ones(size); };
  p.u0 = Vector::Ones(size);
  p.is_linear = true;
  p.autonomous = true;
  return p;
}

OdeProblem constant_linear(Matrix a, Vector b, Vector c, Vector u0) {
  const Index m = static_cast<Index>(a.rows());
  if (a.cols() != a.rows() || b.size() != a.rows() || c.size() != a.rows() || u0.size() != a.rows())
    throw ValidationError("constant_linear: inconsistent sizes");
  OdeProblem p;
  p.name = "linear";
  p.size = m;
  p.kappa = [a, b, c](double t, const Vector& u) -> Vector { return a * u - (b + std::sin(t) * c); };
  p.jacobian = [a](double, const Vector&) -> Matrix { return a; };
  p.picard = [a, b, c](double t, const Vector&) { return PicardSplit{a, -(b + std::sin(t) * c)}; };
  p.u0 = std::move(u0);
  p.is_linear = true;
  p.autonomous = true;
  return p;
}

OdeProblem random_stable_linear(Index size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto draw = [&](Index r, Index c) {
    Matrix m(r, c);
    for (Index j = 0; j < c; ++j)
      for (Index i = 0; i < r; ++i) m(i, j) = dist(rng);
    return m;
  };
  const Matrix s = draw(size, size);
  const Matrix k = draw(size, size);
  Matrix a = s * s.transpose() + 0.5 * Matrix::Identity(size, size) + (k - k.transpose());
  auto p = constant_linear(std::move(a), draw(size, 1), draw(size, 1), draw(size, 1));
  p.name = "random-linear";
  return p;
}

OdeProblem lotka_volterra(const LotkaVolterraParams& q) {
  if (!(q.alpha > 0.0) || !(q.gamma > 0.0)) throw ValidationError("lotka-volterra: alpha and gamma must be positive");
  if (q.beta < 0.0 || q.delta < 0.0) throw ValidationError("lotka-volterra: beta and delta must be non-negative");
  OdeProblem p;
  p.name = "lotka-volterra";
  p.size = 2;
  p.kappa = [q](double, const Vector& x) -> Vector {
    Vector k(2);
    k[0] = -q.alpha * x[0] + q.beta * x[0] * x[1];
    k[1] = -q.delta * x[0] * x[1] + q.gamma * x[1];
    return k;
  };
  p.jacobian = [q](double, const Vector& x) -> Matrix {
    Matrix j(2, 2);
    j << -q.alpha + q.beta * x[1], q.beta * x[0],
         -q.delta * x[1], -q.delta * x[0] + q.gamma;
    return j;
  };
  p.picard = [q](double, const Vector& xbar) {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = -q.alpha + q.beta * xbar[1];
    a(1, 1) = -q.delta * xbar[0] + q.gamma;
    return PicardSplit{a, Vector::Zero(2)};
  };
  if (q.beta == 0.0 && q.delta == 0.0) {
    p.analytic = [q](double t) -> Vector {
      Vector u(2);
      u << q.u0 * std::exp(q.alpha * t), q.v0 * std::exp(-q.gamma * t);
      return u;
    };
    p.is_linear = true;
  }
  p.u0 = Vector(2);
  p.u0 << q.u0, q.v0;
  p.autonomous = true;
  return p;
}

}  // namespace mlschur
