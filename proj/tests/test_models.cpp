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
#include <numbers>
#include <random>

#include "doctest.h"
#include "mlschur/models.hpp"

using namespace mlschur;

namespace {

// Forward-difference check of the Jacobian on random probes.
void check_jacobian(const OdeProblem& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  const double eps = 1e-6;
  for (int probe = 0; probe < 5; ++probe) {
    const double t = dist(rng) + 2.0;
    Vector u(p.size);
    for (Index i = 0; i < p.size; ++i) u(i) = dist(rng) * 10.0;
    const Matrix j = p.jacobian(t, u);
    const Vector k0 = p.kappa(t, u);
    for (Index c = 0; c < p.size; ++c) {
      Vector up = u;
      up(c) += eps;
      const Vector fd = (p.kappa(t, up) - k0) / eps;
      CHECK((fd - j.col(c)).norm() <= 10 * eps * (1 + j.norm()));
    }
    if (p.is_linear) {
      Vector other(p.size);
      for (Index i = 0; i < p.size; ++i) other(i) = dist(rng);
      CHECK(p.jacobian(t, other) == j);
    }
  }
}

}  // namespace

TEST_CASE("linear decay") {
  const auto p = linear_decay(1.0);
  CHECK(p.is_linear);
  CHECK(p.analytic(1.0)(0) == doctest::Approx(0.367879441171).epsilon(1e-12));
  CHECK(p.jacobian(3.0, Vector::Constant(1, 7.0))(0, 0) == 1.0);
  const auto zero = linear_decay(0.0);
  CHECK(zero.analytic(5.0)(0) == 1.0);
  CHECK(zero.kappa(1.0, Vector::Constant(1, 1.0))(0) == 0.0);
  check_jacobian(p, 1);
}

TEST_CASE("forced riccati") {
  const auto p = forced_riccati();
  CHECK_FALSE(p.is_linear);
  CHECK(p.analytic(std::numbers::pi / 2)(0) == doctest::Approx(1.0));
  CHECK(p.jacobian(0.3, Vector::Constant(1, 0.7))(0, 0) == doctest::Approx(-1.4));
  // du/dt + kappa(t, u) = 0 holds for u = sin t.
  for (double t : {0.0, 0.4, 1.3, 2.9, 5.5}) {
    const double du = std::cos(t);
    CHECK(du + p.kappa(t, p.analytic(t))(0) == doctest::Approx(0.0).epsilon(1e-14).scale(1.0));
  }
  // Picard split reproduces kappa at the frozen state.
  const Vector u = Vector::Constant(1, 0.3);
  const auto split = p.picard(1.1, u);
  CHECK((split.matrix * u + split.offset - p.kappa(1.1, u)).norm() < 1e-15);
  check_jacobian(p, 2);
}

TEST_CASE("lotka-volterra") {
  const auto p = lotka_volterra();
  CHECK(p.size == 2);
  CHECK(p.u0(0) == 10.0);
  CHECK(p.u0(1) == 40.0);
  Vector eq(2);
  eq << 20.0, 15.0;
  CHECK(p.kappa(0.0, eq).norm() < 1e-12);
  // du/dt = alpha u - beta u v at an arbitrary point.
  Vector u(2);
  u << 10.0, 40.0;
  const Vector k = p.kappa(0.0, u);
  CHECK(-k(0) == doctest::Approx(3.0 * 10 - 0.2 * 10 * 40));
  CHECK(-k(1) == doctest::Approx(0.1 * 10 * 40 - 2.0 * 40));
  const auto split = p.picard(0.0, u);
  CHECK((split.matrix * u + split.offset - k).norm() < 1e-12);
  check_jacobian(p, 3);

  LotkaVolterraParams free;
  free.beta = 0.0;
  free.delta = 0.0;
  const auto lin = lotka_volterra(free);
  CHECK(lin.is_linear);
  CHECK(lin.analytic(1.0)(0) == doctest::Approx(10.0 * std::exp(3.0)));
  CHECK(lin.analytic(1.0)(1) == doctest::Approx(40.0 * std::exp(-2.0)));

  LotkaVolterraParams bad;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(lotka_volterra(bad), ValidationError);
  bad = {};
  bad.beta = -0.1;
  CHECK_THROWS_AS(lotka_volterra(bad), ValidationError);
}

TEST_CASE("random stable linear systems") {
  for (Index m : {1, 2, 4, 5}) {
    const auto p = random_stable_linear(m, 42 + m);
    CHECK(p.is_linear);
    const Matrix a = p.linear_operator(0.0);
    const Matrix sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    check_jacobian(p, 10 + m);
    // Same seed, same system.
    CHECK(random_stable_linear(m, 42 + m).linear_operator(0.0) == a);
  }
}

TEST_CASE("cosine and transport") {
  const auto c = cosine_forcing();
  CHECK(c.kappa(0.0, Vector::Zero(1))(0) == doctest::Approx(-1.0));
  CHECK(c.analytic(std::numbers::pi / 2)(0) == doctest::Approx(1.0));
  const auto z = zero_operator(3);
  CHECK(z.kappa(1.0, Vector::Ones(3)).norm() == 0.0);
  CHECK(z.u0 == Vector::Ones(3));
}
