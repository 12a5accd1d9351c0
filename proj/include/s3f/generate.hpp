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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "json.hpp"

#include "s3f/error.hpp"
#include "s3f/flow.hpp"
#include "s3f/matrix.hpp"
#include "s3f/metrics.hpp"
#include "s3f/rng.hpp"
#include "s3f/solver.hpp"
#include "s3f/tabular.hpp"

namespace s3f {

struct GenerationRequest {
  Method method = Method::HS3F;
  SolverKind solver = SolverKind::Euler;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  double init_mu = 0.0;
  double init_sigma = 1.0;

  void validate() const {
    if (n_samples < 1) throw ArgumentError("n_samples must be at least 1");
    if (!(init_sigma > 0.0)) throw ArgumentError("initial noise sigma must be positive");
    if (!std::isfinite(init_mu)) throw ArgumentError("initial noise mu must be finite");
  }
};

inline nlohmann::json request_to_json(const GenerationRequest& r) {
  return {{"method", method_name(r.method)}, {"solver", solver_name(r.solver)}, {"n_samples", r.n_samples},
          {"seed", r.seed},                  {"init_mu", r.init_mu},            {"init_sigma", r.init_sigma}};
}

struct GeneratedTable {
  DataTable table;  // original units
  double seconds = 0.0;
};

/// Velocity of one sequential feature: the (output, level) regressor applied
/// to the current state next to the already generated context columns.
class SequentialField {
 public:
  SequentialField(const std::vector<gbt::GbtRegressor>& levels, const Matrix& context, std::size_t width,
                  TimeGrid grid)
      : levels_(levels), context_(context), width_(width), grid_(grid) {}

  Matrix operator()(double t, const Matrix& x) const {
    const auto& model = levels_.at(grid_.level_for(t));
    Matrix design(x.rows(), 1 + width_);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      design(r, 0) = x(r, 0);
      for (std::size_t c = 0; c < width_; ++c) design(r, 1 + c) = context_(r, c);
    }
    const auto v = model.predict(design);
    Matrix out(x.rows(), 1);
    std::copy(v.begin(), v.end(), out.data().begin());
    return out;
  }

 private:
  const std::vector<gbt::GbtRegressor>& levels_;
  const Matrix& context_;
  std::size_t width_;
  TimeGrid grid_;
};

/// Joint velocity over every one-hot column: one regressor per column.
class JointField {
 public:
  JointField(const std::vector<std::vector<gbt::GbtRegressor>>& outputs, TimeGrid grid)
      : outputs_(outputs), grid_(grid) {}

  Matrix operator()(double t, const Matrix& x) const {
    const std::size_t level = grid_.level_for(t);
    Matrix out(x.rows(), outputs_.size());
    for (std::size_t o = 0; o < outputs_.size(); ++o) out.set_col(o, outputs_[o].at(level).predict(x));
    return out;
  }

 private:
  const std::vector<std::vector<gbt::GbtRegressor>>& outputs_;
  TimeGrid grid_;
};

namespace detail {

// Generated columns of one partition in feature order, on the scaled axis.
inline Matrix generate_part(const VelocityModelBank& bank, const SubBank& sub, std::size_t n,
                            const GenerationRequest& req, std::uint64_t stream) {
  const auto& order = bank.plan.feature_order;
  const SolverConfig cfg{req.solver, bank.plan.grid};
  if (n == 0) return Matrix(0, order.size());

  if (bank.plan.method == Method::FF) {
    const OneHotMap map = make_one_hot_map(bank.ordered_schema());
    Rng rng(mix_seed(stream, 0));
    Matrix z(n, map.width);
    for (auto& v : z.data()) v = req.init_mu + req.init_sigma * rng.normal();
    const Matrix x = integrate_batch(JointField(sub.regressors, bank.plan.grid), std::move(z), cfg);
    return one_hot_decode(x, map, true).cells;
  }

  Matrix ctx(n, order.size());
  std::size_t output = 0;
  for (std::size_t q = 0; q < order.size(); ++q) {
    const auto& col = bank.schema.columns[order[q]];
    if (!col.categorical()) {
      Rng rng(mix_seed(stream, 2 * q));
      Matrix z(n, 1);
      for (auto& v : z.data()) v = req.init_mu + req.init_sigma * rng.normal();
      const Matrix x = integrate_batch(SequentialField(sub.regressors.at(output), ctx, q, bank.plan.grid),
                                       std::move(z), cfg);
      ++output;
      for (std::size_t r = 0; r < n; ++r) ctx(r, q) = x(r, 0);
      continue;
    }
    Rng rng(mix_seed(stream, 2 * q + 1));
    if (q == 0 && !sub.first_frequencies.empty()) {
      for (std::size_t r = 0; r < n; ++r)
        ctx(r, q) = static_cast<double>(rng.categorical(sub.first_frequencies));
      continue;
    }
    const auto& clf = sub.classifiers.at(q);
    if (!clf) throw FormatError("bank lacks the classifier for column '" + col.name + "'");
    Matrix prev(n, q);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < q; ++c) prev(r, c) = ctx(r, c);
    const Matrix p = clf->predict_proba(prev);
    for (std::size_t r = 0; r < n; ++r) ctx(r, q) = static_cast<double>(rng.categorical(p.row(r)));
  }
  return ctx;
}

}  // namespace detail

/// Samples `req.n_samples` rows from the bank and returns them in original
/// units, continuous columns clipped to the training range.
inline GeneratedTable generate(const VelocityModelBank& bank, const GenerationRequest& req) {
  req.validate();
  if (req.method != bank.plan.method)
    throw ModeError("request method " + std::string(method_name(req.method)) + " does not match bank method " +
                    std::string(method_name(bank.plan.method)));
  const auto start = std::chrono::steady_clock::now();
  const auto& order = bank.plan.feature_order;
  const bool per_label = bank.plan.conditioning == Conditioning::PerLabel;

  Rng mixer(mix_seed(req.seed, 0));
  std::vector<std::size_t> counts(bank.banks.size(), 0);
  if (per_label) {
    for (std::size_t i = 0; i < req.n_samples; ++i) ++counts[mixer.categorical(bank.label_frequencies)];
  } else {
    counts[0] = req.n_samples;
  }

  DataTable out;
  out.schema = bank.schema;
  out.scaled = true;
  out.cells = Matrix(0, bank.schema.width());
  for (std::size_t b = 0; b < bank.banks.size(); ++b) {
    if (counts[b] == 0) continue;
    const Matrix part = detail::generate_part(bank, bank.banks[b], counts[b], req, mix_seed(req.seed, 1 + b));
    Matrix cells(counts[b], bank.schema.width());
    for (std::size_t r = 0; r < counts[b]; ++r) {
      for (std::size_t q = 0; q < order.size(); ++q) cells(r, order[q]) = part(r, q);
      if (per_label) cells(r, *bank.schema.target) = static_cast<double>(b);
    }
    out.cells.append_rows(cells);
  }
  if (per_label) {
    std::vector<std::size_t> perm(out.rows());
    std::iota(perm.begin(), perm.end(), 0);
    mixer.shuffle(perm.begin(), perm.end());
    out.cells = out.cells.select_rows(perm);
  }
  GeneratedTable g;
  g.table = minmax_inverse_clip(out, bank.scaler);
  g.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return g;
}

// ---------------------------------------------------------------------------
// Sensitivity to the initial noise distribution

struct NoisePerturbation {
  double mu = 0.0;
  double sigma = 1.0;
};

inline std::vector<NoisePerturbation> default_perturbations() { return {{0.1, 1.1}, {0.0, 0.9}, {0.0, 1.1}}; }

struct SensitivityRow {
  NoisePerturbation noise;
  double w_train = 0.0;
  double w_test = 0.0;
  double delta_train = 0.0;  // |W_modified - W_default| against the training rows
  double delta_test = 0.0;
};

struct SensitivityReport {
  double w_train_default = 0.0;
  double w_test_default = 0.0;
  std::vector<SensitivityRow> rows;
};

/// Generates once from N(0, 1) and once per perturbation with the same seed,
/// and reports the change in Wasserstein distance to both real splits.
inline SensitivityReport run_sensitivity(const VelocityModelBank& bank, GenerationRequest base,
                                         std::span<const NoisePerturbation> perturbations,
                                         const DataTable& real_train, const DataTable& real_test,
                                         const MetricsOptions& metrics = {}) {
  if (perturbations.empty()) throw ArgumentError("sensitivity needs at least one perturbation");
  base.init_mu = 0.0;
  base.init_sigma = 1.0;
  SensitivityReport rep;
  const auto ref = transport_distances(real_train, real_test, generate(bank, base).table, metrics);
  rep.w_train_default = ref.first;
  rep.w_test_default = ref.second;
  for (const auto& p : perturbations) {
    GenerationRequest req = base;
    req.init_mu = p.mu;
    req.init_sigma = p.sigma;
    const auto w = transport_distances(real_train, real_test, generate(bank, req).table, metrics);
    rep.rows.push_back({p, w.first, w.second, std::abs(w.first - ref.first), std::abs(w.second - ref.second)});
  }
  return rep;
}

}  // namespace s3f
