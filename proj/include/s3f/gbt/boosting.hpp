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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "s3f/error.hpp"
#include "s3f/gbt/tree.hpp"
#include "s3f/matrix.hpp"

namespace s3f::gbt {

struct GbtParams {
  int trees = 100;
  double learning_rate = 0.3;
  int max_depth = 6;
  std::size_t min_samples_leaf = 1;
  std::uint64_t seed = 0;
  /// L2 term in the classifier's Newton leaf values.
  double reg_lambda = 1.0;

  static GbtParams regressor_defaults() { return {}; }
  static GbtParams classifier_defaults() {
    GbtParams p;
    p.trees = 115;
    p.learning_rate = 0.1;
    return p;
  }

  void validate() const {
    if (trees < 0) throw ArgumentError("trees must be non-negative");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ArgumentError("learning_rate must be positive");
    if (max_depth < 0) throw ArgumentError("max_depth must be non-negative");
    if (min_samples_leaf < 1) throw ArgumentError("min_samples_leaf must be at least 1");
    if (reg_lambda < 0.0) throw ArgumentError("reg_lambda must be non-negative");
  }

  friend bool operator==(const GbtParams&, const GbtParams&) = default;
};

inline void to_json(nlohmann::json& j, const GbtParams& p) {
  j = {{"trees", p.trees},
       {"learning_rate", p.learning_rate},
       {"max_depth", p.max_depth},
       {"min_samples_leaf", p.min_samples_leaf},
       {"seed", p.seed},
       {"reg_lambda", p.reg_lambda}};
}

inline void from_json(const nlohmann::json& j, GbtParams& p) {
  p.trees = j.value("trees", p.trees);
  p.learning_rate = j.value("learning_rate", p.learning_rate);
  p.max_depth = j.value("max_depth", p.max_depth);
  p.min_samples_leaf = j.value("min_samples_leaf", p.min_samples_leaf);
  p.seed = j.value("seed", p.seed);
  p.reg_lambda = j.value("reg_lambda", p.reg_lambda);
}

namespace detail {

inline void check_finite(const Matrix& x) {
  if (!x.all_finite()) throw NumericError("non-finite value in design matrix");
}

inline TreeParams tree_params(const GbtParams& p) {
  return TreeParams{p.max_depth, p.min_samples_leaf, 0};
}

}  // namespace detail

/// Least-squares gradient boosting:
///   predict(x) = base_score + learning_rate * sum_trees tree(x).
class GbtRegressor {
 public:
  GbtRegressor() = default;

  const GbtParams& params() const noexcept { return params_; }
  double base_score() const noexcept { return base_score_; }
  std::size_t width() const noexcept { return width_; }
  const std::vector<Tree>& trees() const noexcept { return trees_; }

  double predict_row(std::span<const double> x) const {
    double sum = 0.0;
    for (const auto& t : trees_) sum += t.predict(x);
    return base_score_ + params_.learning_rate * sum;
  }

  std::vector<double> predict(const Matrix& x) const {
    if (x.cols() != width_) throw SchemaError("design width " + std::to_string(x.cols()) +
                                              " does not match model width " + std::to_string(width_));
    std::vector<double> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict_row(x.row(r));
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : trees_) trees.push_back(tree_to_json(t));
    return {{"model", "gbt_regressor"}, {"params", params_}, {"width", width_},
            {"base_score", base_score_}, {"trees", std::move(trees)}};
  }

  static GbtRegressor from_json(const nlohmann::json& j) {
    try {
      if (j.at("model") != "gbt_regressor") throw FormatError("not a gbt_regressor model");
      GbtRegressor m;
      m.params_ = j.at("params").get<GbtParams>();
      m.width_ = j.at("width").get<std::size_t>();
      m.base_score_ = j.at("base_score").get<double>();
      for (const auto& t : j.at("trees")) m.trees_.push_back(tree_from_json(t, m.width_));
      return m;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("corrupt regressor: ") + e.what());
    }
  }

 private:
  friend GbtRegressor fit_regressor(const Matrix&, std::span<const double>, const GbtParams&,
                                    std::vector<double>*);
  GbtParams params_;
  std::size_t width_ = 0;
  double base_score_ = 0.0;
  std::vector<Tree> trees_;
};

/// Each round fits one tree to the current residuals; leaves hold residual
/// means, so training MSE never increases for learning_rate <= 1.
/// `mse_trace`, when given, receives the training MSE before the first tree
/// and after every tree.
inline GbtRegressor fit_regressor(const Matrix& x, std::span<const double> y, const GbtParams& params,
                                  std::vector<double>* mse_trace = nullptr) {
  params.validate();
  const std::size_t n = x.rows();
  if (n == 0) throw ArgumentError("cannot fit a regressor on empty data");
  if (y.size() != n) throw ArgumentError("target length does not match row count");
  detail::check_finite(x);
  for (double v : y)
    if (!std::isfinite(v)) throw NumericError("non-finite regression target");

  GbtRegressor model;
  model.params_ = params;
  model.width_ = x.cols();
  double mean = 0.0;
  for (double v : y) mean += v;
  model.base_score_ = mean / static_cast<double>(n);

  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - model.base_score_;
  auto mse = [&] {
    double s = 0.0;
    for (double r : residual) s += r * r;
    return s / static_cast<double>(n);
  };
  if (mse_trace) mse_trace->assign(1, mse());

  const SortedColumns sorted(x);
  const TreeBuilder builder(x, sorted);
  const TreeParams tp = detail::tree_params(params);
  std::vector<int> leaf;
  model.trees_.reserve(static_cast<std::size_t>(params.trees));
  for (int t = 0; t < params.trees; ++t) {
    Tree tree = builder.build(residual, 1, {}, tp, nullptr, &leaf);
    for (std::size_t i = 0; i < n; ++i) residual[i] -= params.learning_rate * tree.value[static_cast<std::size_t>(leaf[i])];
    model.trees_.push_back(std::move(tree));
    if (mse_trace) mse_trace->push_back(mse());
  }
  return model;
}

/// Softmax gradient boosting: per round, one tree per class fitted to the
/// log-loss gradient (y_k - p_k), with Newton leaf values
/// sum(g) / (sum(p(1-p)) + lambda). A round's step is halved until the
/// training log-loss does not increase; the factor is folded into the leaves.
class GbtClassifier {
 public:
  GbtClassifier() = default;

  const GbtParams& params() const noexcept { return params_; }
  std::size_t class_count() const noexcept { return class_count_; }
  std::size_t width() const noexcept { return width_; }
  /// Set when the training labels contained a single class.
  std::optional<std::size_t> degenerate_class() const noexcept { return degenerate_; }
  const std::vector<std::vector<Tree>>& rounds() const noexcept { return rounds_; }

  void scores_row(std::span<const double> x, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& round : rounds_)
      for (std::size_t k = 0; k < class_count_; ++k) out[k] += round[k].predict(x);
    for (auto& v : out) v *= params_.learning_rate;
  }

  Matrix predict_proba(const Matrix& x) const {
    if (x.cols() != width_) throw SchemaError("design width " + std::to_string(x.cols()) +
                                              " does not match model width " + std::to_string(width_));
    Matrix out(x.rows(), class_count_);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      auto p = out.row(r);
      if (degenerate_) {
        p[*degenerate_] = 1.0;
        continue;
      }
      scores_row(x.row(r), p);
      softmax_inplace(p);
    }
    return out;
  }

  std::vector<std::size_t> predict(const Matrix& x) const {
    const Matrix p = predict_proba(x);
    std::vector<std::size_t> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const auto row = p.row(r);
      out[r] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return out;
  }

  static void softmax_inplace(std::span<double> s) {
    const double mx = *std::max_element(s.begin(), s.end());
    double z = 0.0;
    for (auto& v : s) z += (v = std::exp(v - mx));
    for (auto& v : s) v /= z;
  }

  nlohmann::json to_json() const {
    nlohmann::json rounds = nlohmann::json::array();
    for (const auto& round : rounds_) {
      nlohmann::json r = nlohmann::json::array();
      for (const auto& t : round) r.push_back(tree_to_json(t));
      rounds.push_back(std::move(r));
    }
    return {{"model", "gbt_classifier"},
            {"params", params_},
            {"width", width_},
            {"class_count", class_count_},
            {"degenerate_class", degenerate_ ? nlohmann::json(*degenerate_) : nlohmann::json(nullptr)},
            {"rounds", std::move(rounds)}};
  }

  static GbtClassifier from_json(const nlohmann::json& j) {
    try {
      if (j.at("model") != "gbt_classifier") throw FormatError("not a gbt_classifier model");
      GbtClassifier m;
      m.params_ = j.at("params").get<GbtParams>();
      m.width_ = j.at("width").get<std::size_t>();
      m.class_count_ = j.at("class_count").get<std::size_t>();
      if (!j.at("degenerate_class").is_null()) m.degenerate_ = j.at("degenerate_class").get<std::size_t>();
      for (const auto& r : j.at("rounds")) {
        std::vector<Tree> round;
        for (const auto& t : r) round.push_back(tree_from_json(t, m.width_));
        if (round.size() != m.class_count_) throw FormatError("round has wrong tree count");
        m.rounds_.push_back(std::move(round));
      }
      if (m.class_count_ == 0 || (m.degenerate_ && *m.degenerate_ >= m.class_count_))
        throw FormatError("invalid class count");
      return m;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("corrupt classifier: ") + e.what());
    }
  }

 private:
  friend GbtClassifier fit_classifier(const Matrix&, std::span<const std::size_t>, const GbtParams&,
                                      std::size_t, std::vector<double>*);
  GbtParams params_;
  std::size_t width_ = 0;
  std::size_t class_count_ = 0;
  std::optional<std::size_t> degenerate_;
  std::vector<std::vector<Tree>> rounds_;
};

/// `class_count` 0 means max(y) + 1. `loss_trace`, when given, receives the
/// mean training log-loss before the first round and after every round.
inline GbtClassifier fit_classifier(const Matrix& x, std::span<const std::size_t> y, const GbtParams& params,
                                    std::size_t class_count = 0, std::vector<double>* loss_trace = nullptr) {
  params.validate();
  const std::size_t n = x.rows();
  if (n == 0 || y.empty()) throw ArgumentError("cannot fit a classifier without labels");
  if (y.size() != n) throw ArgumentError("label count does not match row count");
  detail::check_finite(x);
  const std::size_t max_code = *std::max_element(y.begin(), y.end());
  if (class_count == 0) class_count = max_code + 1;
  if (max_code >= class_count) throw ArgumentError("label code outside [0, class_count)");

  GbtClassifier model;
  model.params_ = params;
  model.width_ = x.cols();
  model.class_count_ = class_count;
  if (std::all_of(y.begin(), y.end(), [&](std::size_t c) { return c == y[0]; })) {
    model.degenerate_ = y[0];
    if (loss_trace) loss_trace->assign(1, 0.0);
    return model;
  }

  const std::size_t k_count = class_count;
  Matrix score(n, k_count);
  Matrix prob(n, k_count);
  auto refresh = [&](const Matrix& s, Matrix& p) {
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto pr = p.row(i);
      const auto sr = s.row(i);
      std::copy(sr.begin(), sr.end(), pr.begin());
      const double mx = *std::max_element(sr.begin(), sr.end());
      double z = 0.0;
      for (std::size_t k = 0; k < k_count; ++k) z += std::exp(sr[k] - mx);
      loss += mx + std::log(z) - sr[y[i]];
      GbtClassifier::softmax_inplace(pr);
    }
    return loss / static_cast<double>(n);
  };
  double loss = refresh(score, prob);
  if (loss_trace) loss_trace->assign(1, loss);

  const SortedColumns sorted(x);
  const TreeBuilder builder(x, sorted);
  const TreeParams tp = detail::tree_params(params);
  std::vector<double> grad(n), hess_sum;
  std::vector<std::vector<int>> leaves(k_count);
  Matrix trial(n, k_count), trial_prob(n, k_count);

  for (int round = 0; round < params.trees; ++round) {
    std::vector<Tree> trees;
    trees.reserve(k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
      for (std::size_t i = 0; i < n; ++i) grad[i] = (y[i] == k ? 1.0 : 0.0) - prob(i, k);
      Tree tree = builder.build(grad, 1, {}, tp, nullptr, &leaves[k]);
      std::vector<double> gsum(tree.node_count(), 0.0);
      hess_sum.assign(tree.node_count(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto l = static_cast<std::size_t>(leaves[k][i]);
        gsum[l] += grad[i];
        hess_sum[l] += prob(i, k) * (1.0 - prob(i, k));
      }
      for (std::size_t node = 0; node < tree.node_count(); ++node) {
        if (tree.is_leaf(node)) {
          const double denom = hess_sum[node] + params.reg_lambda;
          tree.value[node] = denom > 0.0 ? gsum[node] / denom : 0.0;
        }
      }
      trees.push_back(std::move(tree));
    }

    double step = 1.0;
    double trial_loss = loss;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving, step *= 0.5) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < k_count; ++k)
          trial(i, k) = score(i, k) + params.learning_rate * step *
                                          trees[k].value[static_cast<std::size_t>(leaves[k][i])];
      trial_loss = refresh(trial, trial_prob);
      if (trial_loss <= loss) {
        accepted = true;
        break;
      }
    }
    if (!accepted) step = 0.0;
    if (step != 1.0)
      for (auto& t : trees)
        for (auto& v : t.value) v *= step;
    if (accepted) {
      std::swap(score, trial);
      std::swap(prob, trial_prob);
      loss = trial_loss;
    }
    model.rounds_.push_back(std::move(trees));
    if (loss_trace) loss_trace->push_back(loss);
  }
  return model;
}

}  // namespace s3f::gbt
