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

#include <cstdint>
#include <functional>
#include <string>

#include "mlschur/types.hpp"

namespace mlschur {

/// Frozen-coefficient form kappa(t, u) ~= matrix(ubar) * u + offset(t).
struct PicardSplit {
  Matrix matrix;
  Vector offset;
};

/// du/dt + kappa(t, u) = 0, u(0) = u0.
///
/// Time-dependent forcing lives inside kappa. For linear problems kappa is
/// affine, kappa(t, u) = A(t) u - f(t), and A, f are recovered through
/// `linear_operator` / `linear_forcing`.
struct OdeProblem {
  std::string name;
  Index size = 0;
  std::function<Vector(double, const Vector&)> kappa;
  std::function<Matrix(double, const Vector&)> jacobian;
  std::function<PicardSplit(double, const Vector&)> picard;  // optional
  std::function<Vector(double)> analytic;                    // optional
  Vector u0;
  bool is_linear = false;
  /// Jacobian does not depend on t; lets linear assembly reuse one
  /// factorization across equal-width elements.
  bool autonomous = false;

  bool has_picard() const { return static_cast<bool>(picard); }
  bool has_analytic() const { return static_cast<bool>(analytic); }
  Matrix linear_operator(double t) const { return jacobian(t, Vector::Zero(size)); }
  Vector linear_forcing(double t) const { return -kappa(t, Vector::Zero(size)); }
};

/// du/dt + lambda u = 0, u(0) = 1.
OdeProblem linear_decay(double lambda);

/// du/dt - u^2 = cos t - sin^2 t, u(0) = 0, exact solution sin t.
OdeProblem forced_riccati();

/// du/dt = cos t, u(0) = 0.
OdeProblem cosine_forcing();

/// du/dt = 0 in `size` unknowns with u(0) = 1.
OdeProblem zero_operator(Index size = 1);

/// du/dt + A u = f(t) with constant A and forcing b + c sin t.
OdeProblem constant_linear(Matrix a, Vector b, Vector c, Vector u0);

/// Random linear system whose operator has positive definite symmetric
/// part (so every implicit step is well posed). Deterministic in `seed`.
OdeProblem random_stable_linear(Index size, std::uint64_t seed);

struct LotkaVolterraParams {
  double alpha = 3.0;
  double beta = 0.2;
  double gamma = 2.0;
  double delta = 0.1;
  double u0 = 10.0;
  double v0 = 40.0;
};

/// Prey u, predator v: du/dt = alpha u - beta u v, dv/dt = delta u v - gamma v.
/// Picard split freezes v in the prey product and u in the predator product.
OdeProblem lotka_volterra(const LotkaVolterraParams& params = {});

}  // namespace mlschur
