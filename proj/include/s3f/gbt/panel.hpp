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
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "s3f/error.hpp"
#include "s3f/gbt/boosting.hpp"
#include "s3f/gbt/tree.hpp"
#include "s3f/matrix.hpp"
#include "s3f/rng.hpp"
#include "s3f/tabular.hpp"

namespace s3f::gbt {

enum class Task { Classification, Regression };

inline Task task_for(const TableSchema& schema) {
  if (!schema.target) throw ArgumentError("efficacy needs a target column");
  return schema.columns[*schema.target].categorical() ? Task::Classification : Task::Regression;
}

// ---------------------------------------------------------------------------
// Scores

/// Macro-averaged F1 over the union of true and predicted classes.
inline double macro_f1(std::span<const std::size_t> truth, std::span<const std::size_t> pred) {
  if (truth.size() != pred.size()) throw ArgumentError("prediction length mismatch");
  std::set<std::size_t> labels(truth.begin(), truth.end());
  labels.insert(pred.begin(), pred.end());
  if (labels.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t c : labels) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (pred[i] == c && truth[i] == c) ++tp;
      else if (pred[i] == c) ++fp;
      else if (truth[i] == c) ++fn;
    }
    const double denom = 2 * tp + fp + fn;
    total += denom > 0 ? 2 * tp / denom : 0.0;
  }
  return total / static_cast<double>(labels.size());
}

/// Coefficient of determination; 0 when the truth has zero variance.
inline double r2_score(std::span<const double> truth, std::span<const double> pred) {
  if (truth.size() != pred.size()) throw ArgumentError("prediction length mismatch");
  if (truth.empty()) return 0.0;
  double mean = 0.0;
  for (double v : truth) mean += v;
  mean /= static_cast<double>(truth.size());
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
    ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
  }
  if (ss_tot == 0.0) return 0.0;
  return 1.0 - ss_res / ss_tot;
}

// ---------------------------------------------------------------------------
// Panel learners

/// Bagged depth-unlimited trees with sqrt(d) features per node. For
/// classification the leaves hold class proportions (one-hot targets).
class RandomForest {
 public:
  void fit(const Matrix& x, std::span<const double> y, std::size_t outputs, int trees, std::uint64_t seed) {
    outputs_ = outputs;
    width_ = x.cols();
    trees_.clear();
    const std::size_t n = x.rows();
    const SortedColumns sorted(x);
    const TreeBuilder builder(x, sorted);
    TreeParams tp;
    tp.max_depth = -1;
    tp.min_samples_leaf = 1;
    tp.max_features = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(x.cols()))));
    Rng rng(seed);
    std::vector<double> w(n);
    for (int t = 0; t < trees; ++t) {
      std::fill(w.begin(), w.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) w[rng.below(n)] += 1.0;
      trees_.push_back(builder.build(y, outputs, w, tp, &rng));
    }
  }

  /// Averaged leaf outputs per row (n x outputs).
  Matrix predict(const Matrix& x) const {
    Matrix out(x.rows(), outputs_);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      auto o = out.row(r);
      for (const auto& t : trees_) {
        const auto v = t.values(t.leaf_index(x.row(r)));
        for (std::size_t k = 0; k < outputs_; ++k) o[k] += v[k];
      }
      for (auto& v : o) v /= static_cast<double>(trees_.size());
    }
    return out;
  }

 private:
  std::size_t outputs_ = 1;
  std::size_t width_ = 0;
  std::vector<Tree> trees_;
};

/// Multi-class AdaBoost (SAMME) over depth-1 stumps.
class AdaBoostStumps {
 public:
  void fit(const Matrix& x, std::span<const std::size_t> y, std::size_t classes, int rounds) {
    classes_ = classes;
    stumps_.clear();
    alphas_.clear();
    const std::size_t n = x.rows();
    std::vector<double> onehot(n * classes, 0.0);
    for (std::size_t i = 0; i < n; ++i) onehot[i * classes + y[i]] = 1.0;
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    const SortedColumns sorted(x);
    const TreeBuilder builder(x, sorted);
    const TreeParams tp{1, 1, 0};
    for (int m = 0; m < rounds; ++m) {
      Tree stump = builder.build(onehot, classes, w, tp);
      double err = 0.0, wsum = 0.0;
      std::vector<char> miss(n);
      for (std::size_t i = 0; i < n; ++i) {
        miss[i] = vote(stump, x.row(i)) != y[i];
        err += miss[i] ? w[i] : 0.0;
        wsum += w[i];
      }
      err /= wsum;
      const double k = static_cast<double>(std::max<std::size_t>(classes, 2));
      if (err >= 1.0 - 1.0 / k) {
        if (stumps_.empty()) {
          stumps_.push_back(std::move(stump));
          alphas_.push_back(1.0);
        }
        break;
      }
      if (err <= 1e-12) {
        stumps_.push_back(std::move(stump));
        alphas_.push_back(10.0);
        break;
      }
      const double alpha = std::log((1.0 - err) / err) + std::log(k - 1.0);
      for (std::size_t i = 0; i < n; ++i)
        if (miss[i]) w[i] *= std::exp(alpha);
      stumps_.push_back(std::move(stump));
      alphas_.push_back(alpha);
    }
  }

  std::vector<std::size_t> predict(const Matrix& x) const {
    std::vector<std::size_t> out(x.rows());
    std::vector<double> votes(classes_);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      std::fill(votes.begin(), votes.end(), 0.0);
      for (std::size_t m = 0; m < stumps_.size(); ++m) votes[vote(stumps_[m], x.row(r))] += alphas_[m];
      out[r] = argmax_lowest(votes);
    }
    return out;
  }

 private:
  static std::size_t vote(const Tree& t, std::span<const double> x) { return argmax_lowest(t.values(t.leaf_index(x))); }

  std::size_t classes_ = 2;
  std::vector<Tree> stumps_;
  std::vector<double> alphas_;
};

/// Multinomial logistic regression (accelerated gradient descent, L2 1e-4)
/// or ridge least squares (normal equations, L2 1e-4). The design gets an
/// intercept column, which is not penalized.
class LinearModel {
 public:
  static constexpr double kL2 = 1e-4;

  void fit_logistic(const Matrix& z, std::span<const std::size_t> y, std::size_t classes, int iterations = 500) {
    const std::size_t n = z.rows(), p = z.cols() + 1;
    classes_ = classes;
    weights_ = Matrix(p, classes);
    double max_norm = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 1.0;
      for (double v : z.row(i)) s += v * v;
      max_norm = std::max(max_norm, s);
    }
    const double step = 1.0 / (0.5 * max_norm + kL2);
    Matrix look = weights_, prev = weights_, grad(p, classes);
    std::vector<double> prob(classes);
    for (int it = 1; it <= iterations; ++it) {
      grad = Matrix(p, classes);
      for (std::size_t i = 0; i < n; ++i) {
        scores(look, z.row(i), prob);
        GbtClassifier::softmax_inplace(prob);
        prob[y[i]] -= 1.0;
        const auto zi = z.row(i);
        for (std::size_t k = 0; k < classes; ++k) {
          for (std::size_t j = 0; j < zi.size(); ++j) grad(j, k) += prob[k] * zi[j];
          grad(p - 1, k) += prob[k];
        }
      }
      Matrix next = look;
      for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < classes; ++k) {
          const double reg = j + 1 < p ? 2.0 * kL2 * look(j, k) : 0.0;
          next(j, k) -= step * (grad(j, k) / static_cast<double>(n) + reg);
        }
      const double momentum = static_cast<double>(it - 1) / static_cast<double>(it + 2);
      for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < classes; ++k) look(j, k) = next(j, k) + momentum * (next(j, k) - prev(j, k));
      prev = std::move(next);
    }
    weights_ = std::move(prev);
  }

  void fit_least_squares(const Matrix& z, std::span<const double> y) {
    const std::size_t n = z.rows(), p = z.cols() + 1;
    classes_ = 0;
    Matrix a(p, p);
    std::vector<double> b(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto zi = z.row(i);
      auto at = [&](std::size_t j) { return j + 1 < p ? zi[j] : 1.0; };
      for (std::size_t r = 0; r < p; ++r) {
        b[r] += at(r) * y[i];
        for (std::size_t c = 0; c < p; ++c) a(r, c) += at(r) * at(c);
      }
    }
    for (std::size_t j = 0; j + 1 < p; ++j) a(j, j) += kL2 * static_cast<double>(n);
    // Gaussian elimination with partial pivoting.
    for (std::size_t col = 0; col < p; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < p; ++r)
        if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
      if (std::abs(a(piv, col)) < 1e-300) continue;
      if (piv != col) {
        for (std::size_t c = 0; c < p; ++c) std::swap(a(col, c), a(piv, c));
        std::swap(b[col], b[piv]);
      }
      for (std::size_t r = col + 1; r < p; ++r) {
        const double f = a(r, col) / a(col, col);
        if (f == 0.0) continue;
        for (std::size_t c = col; c < p; ++c) a(r, c) -= f * a(col, c);
        b[r] -= f * b[col];
      }
    }
    weights_ = Matrix(p, 1);
    for (std::size_t r = p; r-- > 0;) {
      double s = b[r];
      for (std::size_t c = r + 1; c < p; ++c) s -= a(r, c) * weights_(c, 0);
      weights_(r, 0) = std::abs(a(r, r)) < 1e-300 ? 0.0 : s / a(r, r);
    }
  }

  std::vector<double> predict(const Matrix& z) const {
    std::vector<double> out(z.rows());
    std::vector<double> s(weights_.cols());
    for (std::size_t i = 0; i < z.rows(); ++i) {
      scores(weights_, z.row(i), s);
      out[i] = classes_ > 0 ? static_cast<double>(argmax_lowest(s)) : s[0];
    }
    return out;
  }

 private:
  static void scores(const Matrix& w, std::span<const double> z, std::span<double> out) {
    const std::size_t p = w.rows();
    for (std::size_t k = 0; k < w.cols(); ++k) {
      double s = w(p - 1, k);
      for (std::size_t j = 0; j + 1 < p; ++j) s += w(j, k) * z[j];
      out[k] = s;
    }
  }

  std::size_t classes_ = 0;
  Matrix weights_;
};

// ---------------------------------------------------------------------------
// The four-learner efficacy panel

namespace detail {

/// Non-target columns: continuous raw, categorical as codes.
inline Matrix raw_features(const DataTable& t) {
  const auto cols = t.schema.feature_indices();
  Matrix out(t.rows(), cols.size());
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t j = 0; j < cols.size(); ++j) out(r, j) = t.cells(r, cols[j]);
  return out;
}

/// Non-target columns for the linear learner: continuous min-max scaled with
/// the reference table's ranges, categorical one-hot.
inline Matrix linear_features(const DataTable& t, const DataTable& reference) {
  const auto cols = t.schema.feature_indices();
  std::size_t width = 0;
  for (auto c : cols) width += t.schema.columns[c].categorical() ? t.schema.columns[c].cardinality() : 1;
  std::vector<std::pair<double, double>> range(t.width(), {0.0, 0.0});
  for (auto c : cols) {
    if (t.schema.columns[c].categorical() || reference.rows() == 0) continue;
    double lo = reference.cells(0, c), hi = lo;
    for (std::size_t r = 1; r < reference.rows(); ++r) {
      lo = std::min(lo, reference.cells(r, c));
      hi = std::max(hi, reference.cells(r, c));
    }
    range[c] = {lo, hi};
  }
  Matrix out(t.rows(), width);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    std::size_t off = 0;
    for (auto c : cols) {
      const auto& col = t.schema.columns[c];
      if (col.categorical()) {
        out(r, off + static_cast<std::size_t>(t.cells(r, c))) = 1.0;
        off += col.cardinality();
      } else {
        const auto [lo, hi] = range[c];
        out(r, off) = hi > lo ? (t.cells(r, c) - lo) / (hi - lo) : 0.0;
        off += 1;
      }
    }
  }
  return out;
}

}  // namespace detail

struct PanelScores {
  double boosted_trees = 0.0;
  double random_forest = 0.0;
  double adaboost = 0.0;
  double linear = 0.0;

  double mean() const { return (boosted_trees + random_forest + adaboost + linear) / 4.0; }
};

/// A fitted panel: four predictors mapping a table to per-row predictions
/// (class codes for classification, target values for regression).
struct FittedPanel {
  Task task = Task::Classification;
  std::array<std::function<std::vector<double>(const DataTable&)>, 4> predictors;
};

inline FittedPanel fit_panel(const DataTable& train, Task task, std::uint64_t seed = 0) {
  if (!train.schema.target) throw ArgumentError("efficacy panel needs a target column");
  if (train.rows() == 0) throw ArgumentError("efficacy panel needs training rows");
  const std::size_t t = *train.schema.target;
  const Matrix x = detail::raw_features(train);
  const Matrix z = detail::linear_features(train, train);
  FittedPanel panel;
  panel.task = task;
  auto ref = std::make_shared<DataTable>(train);

  if (task == Task::Classification) {
    const std::size_t classes = train.schema.columns[t].cardinality();
    std::vector<std::size_t> y(train.rows());
    std::vector<double> onehot(train.rows() * classes, 0.0);
    for (std::size_t i = 0; i < train.rows(); ++i) {
      y[i] = static_cast<std::size_t>(train.cells(i, t));
      onehot[i * classes + y[i]] = 1.0;
    }
    auto gbc = std::make_shared<GbtClassifier>(fit_classifier(x, y, GbtParams::classifier_defaults(), classes));
    panel.predictors[0] = [gbc](const DataTable& d) {
      const auto p = gbc->predict(detail::raw_features(d));
      return std::vector<double>(p.begin(), p.end());
    };
    auto rf = std::make_shared<RandomForest>();
    rf->fit(x, onehot, classes, 100, mix_seed(seed, 1));
    panel.predictors[1] = [rf](const DataTable& d) {
      const Matrix p = rf->predict(detail::raw_features(d));
      std::vector<double> out(p.rows());
      for (std::size_t r = 0; r < p.rows(); ++r) out[r] = static_cast<double>(argmax_lowest(p.row(r)));
      return out;
    };
    auto ada = std::make_shared<AdaBoostStumps>();
    ada->fit(x, y, classes, 50);
    panel.predictors[2] = [ada](const DataTable& d) {
      const auto p = ada->predict(detail::raw_features(d));
      return std::vector<double>(p.begin(), p.end());
    };
    auto lin = std::make_shared<LinearModel>();
    lin->fit_logistic(z, y, classes);
    panel.predictors[3] = [lin, ref](const DataTable& d) { return lin->predict(detail::linear_features(d, *ref)); };
  } else {
    const std::vector<double> y = train.cells.col(t);
    auto gbr = std::make_shared<GbtRegressor>(fit_regressor(x, y, GbtParams::regressor_defaults()));
    panel.predictors[0] = [gbr](const DataTable& d) { return gbr->predict(detail::raw_features(d)); };
    auto rf = std::make_shared<RandomForest>();
    rf->fit(x, y, 1, 100, mix_seed(seed, 1));
    panel.predictors[1] = [rf](const DataTable& d) { return rf->predict(detail::raw_features(d)).col(0); };
    GbtParams stump;
    stump.trees = 100;
    stump.learning_rate = 0.1;
    stump.max_depth = 1;
    auto sb = std::make_shared<GbtRegressor>(fit_regressor(x, y, stump));
    panel.predictors[2] = [sb](const DataTable& d) { return sb->predict(detail::raw_features(d)); };
    auto lin = std::make_shared<LinearModel>();
    lin->fit_least_squares(z, y);
    panel.predictors[3] = [lin, ref](const DataTable& d) { return lin->predict(detail::linear_features(d, *ref)); };
  }
  return panel;
}

inline PanelScores score_panel(const FittedPanel& panel, const DataTable& test) {
  if (!test.schema.target) throw ArgumentError("test table needs a target column");
  const std::size_t t = *test.schema.target;
  std::array<double, 4> s{};
  for (std::size_t m = 0; m < 4; ++m) {
    const auto pred = panel.predictors[m](test);
    if (panel.task == Task::Classification) {
      std::vector<std::size_t> truth(test.rows()), p(test.rows());
      for (std::size_t i = 0; i < test.rows(); ++i) {
        truth[i] = static_cast<std::size_t>(test.cells(i, t));
        p[i] = static_cast<std::size_t>(pred[i]);
      }
      s[m] = macro_f1(truth, p);
    } else {
      s[m] = r2_score(test.cells.col(t), pred);
    }
  }
  return {s[0], s[1], s[2], s[3]};
}

inline PanelScores evaluate_panel_scores(const DataTable& train, const DataTable& test, Task task,
                                         std::uint64_t seed = 0) {
  if (!(train.schema == test.schema)) throw SchemaError("train and test schemas differ");
  return score_panel(fit_panel(train, task, seed), test);
}

/// Mean macro-F1 (classification) or R^2 (regression) of the four learners
/// fitted on `train` and scored on `test`.
inline double evaluate_panel(const DataTable& train, const DataTable& test, Task task, std::uint64_t seed = 0) {
  return evaluate_panel_scores(train, test, task, seed).mean();
}

}  // namespace s3f::gbt
