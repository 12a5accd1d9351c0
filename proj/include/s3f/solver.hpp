// Copyright 2026 The S3F Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "s3f/error.hpp"
#include "s3f/matrix.hpp"

namespace s3f {

/// Uniform grid t_i = i / n_s, i = 0..n_s-1, step 1 / n_s.
struct TimeGrid {
  int n_s = 50;

  void validate() const {
    if (n_s < 1) throw ArgumentError("n_s must be at least 1");
  }
  std::size_t levels() const { return static_cast<std::size_t>(n_s); }
  double step() const { return 1.0 / n_s; }
  double time(std::size_t i) const { return static_cast<double>(i) / n_s; }

  /// Nearest trained level for a continuous time: round(t * n_s) with halves
  /// rounding up, clamped into [0, n_s - 1].
  std::size_t level_for(double t) const {
    const double x = std::floor(t * n_s + 0.5 + 1e-9);
    if (!(x > 0.0)) return 0;
    return std::min(static_cast<std::size_t>(x), levels() - 1);
  }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

enum class SolverKind { Euler, RK4 };

inline std::string_view solver_name(SolverKind k) { return k == SolverKind::Euler ? "euler" : "rk4"; }

inline SolverKind parse_solver(std::string_view s) {
  if (s == "euler" || s == "Euler") return SolverKind::Euler;
  if (s == "rk4" || s == "RK4") return SolverKind::RK4;
  throw ArgumentError("unknown solver '" + std::string(s) + "'");
}

struct SolverConfig {
  SolverKind kind = SolverKind::Euler;
  TimeGrid grid;
};

namespace detail {

inline void axpy(Matrix& out, const Matrix& x, double a, const Matrix& v) {
  if (v.rows() != x.rows() || v.cols() != x.cols()) throw SchemaError("velocity has the wrong shape");
  auto o = out.data();
  const auto xs = x.data();
  const auto vs = v.data();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] = xs[k] + a * vs[k];
}

}  // namespace detail

/// Integrates dx/dt = field(t, x) from t = 0 to t = 1 for every row of `x`
/// at once. `field` maps (t, state matrix) to a velocity matrix of the same
/// shape and is queried once per step (Euler) or stage (RK4).
template <class Field>
Matrix integrate_batch(Field&& field, Matrix x, const SolverConfig& cfg) {
  cfg.grid.validate();
  if (!x.all_finite()) throw NumericError("initial state is not finite", 0);
  if (x.rows() == 0) return x;
  const double h = cfg.grid.step();
  Matrix tmp(x.rows(), x.cols());
  for (std::size_t i = 0; i < cfg.grid.levels(); ++i) {
    const double t = cfg.grid.time(i);
    if (cfg.kind == SolverKind::Euler) {
      const Matrix v = field(t, x);
      detail::axpy(x, x, h, v);
    } else {
      const Matrix k1 = field(t, x);
      detail::axpy(tmp, x, h / 2, k1);
      const Matrix k2 = field(t + h / 2, tmp);
      detail::axpy(tmp, x, h / 2, k2);
      const Matrix k3 = field(t + h / 2, tmp);
      detail::axpy(tmp, x, h, k3);
      const Matrix k4 = field(t + h, tmp);
      if (k2.data().size() != k1.data().size() || k4.data().size() != k1.data().size())
        throw SchemaError("velocity has the wrong shape");
      auto xs = x.data();
      const auto a = k1.data(), b = k2.data(), c = k3.data(), d = k4.data();
      for (std::size_t k = 0; k < xs.size(); ++k) xs[k] += h / 6 * (a[k] + 2 * b[k] + 2 * c[k] + d[k]);
    }
    if (!x.all_finite()) throw NumericError("state became non-finite at step " + std::to_string(i), static_cast<int>(i));
  }
  return x;
}

/// Single-trajectory form: one state vector.
template <class Field>
std::vector<double> integrate(Field&& field, std::span<const double> x0, const SolverConfig& cfg) {
  Matrix x(1, x0.size());
  std::copy(x0.begin(), x0.end(), x.data().begin());
  const Matrix out = integrate_batch(std::forward<Field>(field), std::move(x), cfg);
  return std::vector<double>(out.data().begin(), out.data().end());
}

}  // namespace s3f
