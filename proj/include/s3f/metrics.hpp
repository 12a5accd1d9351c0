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
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"

#include "s3f/error.hpp"
#include "s3f/gbt/panel.hpp"
#include "s3f/matrix.hpp"
#include "s3f/rng.hpp"
#include "s3f/tabular.hpp"

namespace s3f {

namespace detail {

/// Network simplex for the uniform transportation problem: m sources with
/// supply p each, p sinks with demand m each, dense cost matrix.
///
/// Arcs 0..m*p-1 are the real arcs (source i -> sink j at i*p + j), followed
/// by one artificial arc per node joining it to an extra root. The tree is
/// kept strongly feasible, which rules out cycling under degeneracy.
class TransportSimplex {
 public:
  TransportSimplex(std::size_t m, std::size_t p, std::vector<double> cost)
      : m_(m), p_(p), real_(m * p), nodes_(m + p), root_(m + p), cost_(std::move(cost)) {
    double max_cost = 0.0;
    for (double c : cost_) max_cost = std::max(max_cost, c);
    art_cost_ = (max_cost + 1.0) * static_cast<double>(nodes_ + 1);
    eps_ = 1e-12 * art_cost_;
    cost_.resize(real_ + nodes_, art_cost_);
    flow_.assign(real_ + nodes_, 0);
    in_tree_.assign(real_ + nodes_, 0);
    parent_.assign(nodes_ + 1, root_);
    pred_.assign(nodes_ + 1, 0);
    up_.assign(nodes_ + 1, 0);
    depth_.assign(nodes_ + 1, 1);
    pi_.assign(nodes_ + 1, 0.0);
    depth_[root_] = 0;
    for (std::size_t v = 0; v < nodes_; ++v) {
      const std::size_t a = real_ + v;
      pred_[v] = a;
      in_tree_[a] = 1;
      if (v < m_) {
        up_[v] = 1;  // v -> root
        flow_[a] = static_cast<std::int64_t>(p_);
        pi_[v] = -art_cost_;
      } else {
        flow_[a] = static_cast<std::int64_t>(m_);  // root -> v
        pi_[v] = art_cost_;
      }
    }
    block_ = std::max<std::size_t>(10, static_cast<std::size_t>(std::sqrt(static_cast<double>(real_))));
  }

  /// Runs to optimality and returns the total cost divided by m*p.
  double solve() {
    std::size_t pivots = 0;
    const std::size_t limit = 1000 * (real_ + nodes_) + 100000;
    while (auto entering = find_entering()) {
      pivot(*entering);
      if (++pivots > limit) throw NumericError("transport solver exceeded its pivot limit");
    }
    for (std::size_t v = 0; v < nodes_; ++v)
      if (flow_[real_ + v] != 0) throw NumericError("transport problem has no feasible solution");
    long double total = 0.0L;
    for (std::size_t a = 0; a < real_; ++a)
      if (flow_[a] != 0) total += static_cast<long double>(flow_[a]) * cost_[a];
    return static_cast<double>(total / (static_cast<long double>(m_) * static_cast<long double>(p_)));
  }

  std::int64_t flow(std::size_t i, std::size_t j) const { return flow_[i * p_ + j]; }

 private:
  double reduced(std::size_t a) const { return cost_[a] + pi_[a / p_] - pi_[m_ + a % p_]; }

  // Block search pricing over the real arcs.
  std::optional<std::size_t> find_entering() {
    double best = -eps_;
    std::optional<std::size_t> arg;
    std::size_t in_block = 0;
    for (std::size_t k = 0; k < real_; ++k) {
      const std::size_t a = next_;
      next_ = next_ + 1 == real_ ? 0 : next_ + 1;
      if (!in_tree_[a]) {
        const double r = reduced(a);
        if (r < best) {
          best = r;
          arg = a;
        }
      }
      if (++in_block == block_) {
        if (arg) return arg;
        in_block = 0;
      }
    }
    return arg;
  }

  void pivot(std::size_t in_arc) {
    const std::size_t first = in_arc / p_, second = m_ + in_arc % p_;
    std::size_t u = first, v = second;
    while (u != v) {
      if (depth_[u] >= depth_[v]) u = parent_[u];
      else v = parent_[v];
    }
    const std::size_t join = u;

    constexpr std::int64_t inf = std::numeric_limits<std::int64_t>::max();
    std::int64_t delta = inf;
    std::size_t u_out = root_;
    int side = 0;
    for (std::size_t w = first; w != join; w = parent_[w]) {
      const std::int64_t d = up_[w] ? flow_[pred_[w]] : inf;
      if (d < delta) {
        delta = d;
        u_out = w;
        side = 1;
      }
    }
    for (std::size_t w = second; w != join; w = parent_[w]) {
      const std::int64_t d = up_[w] ? inf : flow_[pred_[w]];
      if (d <= delta) {
        delta = d;
        u_out = w;
        side = 2;
      }
    }
    if (side == 0) throw NumericError("transport problem is unbounded");

    if (delta > 0) {
      flow_[in_arc] += delta;
      for (std::size_t w = first; w != join; w = parent_[w]) flow_[pred_[w]] += up_[w] ? -delta : delta;
      for (std::size_t w = second; w != join; w = parent_[w]) flow_[pred_[w]] += up_[w] ? delta : -delta;
    }

    in_tree_[pred_[u_out]] = 0;
    in_tree_[in_arc] = 1;
    // Re-hang the detached subtree from the entering arc, reversing the path
    // between its new root and the old attachment point.
    std::size_t w = side == 1 ? first : second;
    std::size_t new_parent = side == 1 ? second : first;
    std::size_t new_pred = in_arc;
    char new_up = side == 1 ? 1 : 0;
    const std::size_t sub_root = w;
    for (;;) {
      const std::size_t old_parent = parent_[w], old_pred = pred_[w];
      const char old_up = up_[w];
      parent_[w] = new_parent;
      pred_[w] = new_pred;
      up_[w] = new_up;
      if (w == u_out) break;
      new_parent = w;
      new_pred = old_pred;
      new_up = static_cast<char>(!old_up);
      w = old_parent;
    }
    refresh_subtree(sub_root);
  }

  // Recomputes depth and potentials below `top` from its (new) parent.
  void refresh_subtree(std::size_t top) {
    child_start_.assign(nodes_ + 2, 0);
    for (std::size_t v = 0; v < nodes_; ++v) ++child_start_[parent_[v] + 1];
    for (std::size_t v = 0; v <= nodes_; ++v) child_start_[v + 1] += child_start_[v];
    children_.resize(nodes_);
    fill_.assign(child_start_.begin(), child_start_.end() - 1);
    for (std::size_t v = 0; v < nodes_; ++v) children_[fill_[parent_[v]]++] = v;

    queue_.clear();
    queue_.push_back(top);
    for (std::size_t h = 0; h < queue_.size(); ++h) {
      const std::size_t v = queue_[h], par = parent_[v];
      depth_[v] = depth_[par] + 1;
      const double c = cost_[pred_[v]];
      pi_[v] = up_[v] ? pi_[par] - c : pi_[par] + c;
      for (std::size_t k = child_start_[v]; k < child_start_[v + 1]; ++k) queue_.push_back(children_[k]);
    }
  }

  std::size_t m_, p_, real_, nodes_, root_;
  std::vector<double> cost_;
  std::vector<std::int64_t> flow_;
  std::vector<char> in_tree_;
  std::vector<std::size_t> parent_, pred_, depth_;
  std::vector<char> up_;
  std::vector<double> pi_;
  double art_cost_ = 0.0, eps_ = 0.0;
  std::size_t block_ = 10, next_ = 0;
  std::vector<std::size_t> child_start_, children_, fill_, queue_;
};

inline double l1_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
  return s;
}

inline double squared_l2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

}  // namespace detail

/// Exact 1-Wasserstein distance with L1 ground cost between the uniform
/// empirical measures on the rows of `a` and `b`.
inline double wasserstein1(const Matrix& a, const Matrix& b, std::size_t max_points = 1000) {
  if (a.cols() != b.cols()) throw SchemaError("point sets have different dimensions");
  if (a.rows() == 0 || b.rows() == 0) throw ArgumentError("point sets must be non-empty");
  if (a.rows() > max_points || b.rows() > max_points)
    throw SizeError("point set exceeds ot_max_points; subsample first");
  if (!a.all_finite() || !b.all_finite()) throw NumericError("point sets contain non-finite values");
  const std::size_t m = a.rows(), p = b.rows();
  std::vector<double> cost(m * p);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < p; ++j) cost[i * p + j] = detail::l1_distance(a.row(i), b.row(j));
  return detail::TransportSimplex(m, p, std::move(cost)).solve();
}

/// Fraction of real points whose k-th-nearest-real-neighbor ball (L2,
/// closed) contains at least one fake point.
inline double coverage(const Matrix& real, const Matrix& fake, std::size_t k = 5) {
  if (real.cols() != fake.cols()) throw SchemaError("point sets have different dimensions");
  if (k == 0 || real.rows() <= k) throw ArgumentError("coverage needs more real points than k");
  const std::size_t m = real.rows();
  std::vector<double> d(m - 1);
  std::size_t covered = 0;
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t n = 0;
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) d[n++] = detail::squared_l2(real.row(i), real.row(j));
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k - 1), d.end());
    const double radius = d[k - 1];
    for (std::size_t j = 0; j < fake.rows(); ++j) {
      if (detail::squared_l2(real.row(i), fake.row(j)) <= radius) {
        ++covered;
        break;
      }
    }
  }
  return static_cast<double>(covered) / static_cast<double>(m);
}

/// Rows of an unscaled table in the evaluation space: continuous columns
/// min-max scaled with `ranges`, categorical columns one-hot.
inline Matrix evaluation_matrix(const DataTable& table, const ScalerState& ranges) {
  const DataTable scaled = minmax_transform(table, ranges);
  return one_hot_encode(scaled, make_one_hot_map(scaled.schema));
}

/// Uniform subsample of at most `limit` rows, kept in original order.
inline Matrix subsample_rows(const Matrix& x, std::size_t limit, std::uint64_t seed) {
  if (x.rows() <= limit) return x;
  std::vector<std::size_t> idx(x.rows());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < limit; ++i) std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
  idx.resize(limit);
  std::sort(idx.begin(), idx.end());
  return x.select_rows(idx);
}

struct EfficacyScores {
  double fake = 0.0;
  double combined = 0.0;
};

/// Panel scores on `real_test` for learners trained on the fake rows and on
/// the real training rows augmented with them. With no fake rows there is
/// nothing to train on and the fake score is NaN.
inline EfficacyScores efficacy(const DataTable& fake_train, const DataTable& real_train, const DataTable& real_test,
                               gbt::Task task, std::uint64_t seed = 0) {
  if (!(fake_train.schema == real_train.schema)) throw SchemaError("fake and real schemas differ");
  EfficacyScores s;
  s.fake = fake_train.rows() == 0 ? std::numeric_limits<double>::quiet_NaN()
                                  : gbt::evaluate_panel(fake_train, real_test, task, seed);
  s.combined = gbt::evaluate_panel(concat_rows(real_train, fake_train), real_test, task, seed);
  return s;
}

struct MetricsOptions {
  std::size_t coverage_k = 5;
  std::size_t ot_max_points = 1000;
  std::uint64_t seed = 0;
};

struct MetricsReport {
  std::string dataset;
  std::string method;
  std::string solver;
  std::string score_kind;  // "f1" or "r2"
  double w_train = 0.0;
  double w_test = 0.0;
  double coverage_train = 0.0;
  double coverage_test = 0.0;
  double score_fake = 0.0;
  double score_comb = 0.0;
  double seconds = 0.0;

  static constexpr const char* csv_header =
      "dataset,method,solver,W_tr,W_te,coverage_tr,coverage_te,score_fake,score_comb,seconds";

  std::string csv_row() const {
    return detail::quote_field(dataset) + "," + detail::quote_field(method) + "," + detail::quote_field(solver) +
           "," + detail::format_real(w_train) + "," + detail::format_real(w_test) + "," +
           detail::format_real(coverage_train) + "," + detail::format_real(coverage_test) + "," +
           detail::format_real(score_fake) + "," + detail::format_real(score_comb) + "," +
           detail::format_real(seconds);
  }

  nlohmann::json to_json() const {
    return {{"dataset", dataset},         {"method", method},           {"solver", solver},
            {"score_kind", score_kind},   {"W_tr", w_train},            {"W_te", w_test},
            {"coverage_tr", coverage_train}, {"coverage_te", coverage_test}, {"score_fake", score_fake},
            {"score_comb", score_comb},   {"seconds", seconds}};
  }
};

/// W_tr and W_te of `fake` in the evaluation space fitted on `real_train`,
/// each set uniformly subsampled to `ot_max_points` first.
inline std::pair<double, double> transport_distances(const DataTable& real_train, const DataTable& real_test,
                                                     const DataTable& fake, const MetricsOptions& opts = {}) {
  if (!(real_train.schema == real_test.schema) || !(real_train.schema == fake.schema))
    throw SchemaError("report tables have different schemas");
  const ScalerState ranges = minmax_fit(real_train);
  const std::size_t cap = opts.ot_max_points;
  const Matrix fk = subsample_rows(evaluation_matrix(fake, ranges), cap, mix_seed(opts.seed, 101));
  const Matrix tr = subsample_rows(evaluation_matrix(real_train, ranges), cap, mix_seed(opts.seed, 102));
  const Matrix te = subsample_rows(evaluation_matrix(real_test, ranges), cap, mix_seed(opts.seed, 103));
  return {wasserstein1(fk, tr, cap), wasserstein1(fk, te, cap)};
}

/// Distances, coverage and efficacy of `fake` against the real splits. All
/// tables are in original units; the evaluation space is fitted on
/// `real_train`.
inline MetricsReport full_report(const DataTable& real_train, const DataTable& real_test, const DataTable& fake,
                                 double seconds, const MetricsOptions& opts = {}) {
  if (seconds < 0.0) throw ArgumentError("seconds must be non-negative");
  MetricsReport r;
  std::tie(r.w_train, r.w_test) = transport_distances(real_train, real_test, fake, opts);
  const ScalerState ranges = minmax_fit(real_train);
  const Matrix fk = evaluation_matrix(fake, ranges);
  r.coverage_train = coverage(evaluation_matrix(real_train, ranges), fk, opts.coverage_k);
  r.coverage_test = coverage(evaluation_matrix(real_test, ranges), fk, opts.coverage_k);
  const gbt::Task task = gbt::task_for(real_train.schema);
  r.score_kind = task == gbt::Task::Classification ? "f1" : "r2";
  const auto eff = efficacy(fake, real_train, real_test, task, opts.seed);
  r.score_fake = eff.fake;
  r.score_comb = eff.combined;
  r.seconds = seconds;
  return r;
}

}  // namespace s3f
