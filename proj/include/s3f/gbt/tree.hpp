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
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "json.hpp"
#include "s3f/error.hpp"
#include "s3f/matrix.hpp"
#include "s3f/rng.hpp"

namespace s3f::gbt {

/// Binary regression tree stored as flat node arrays. Rows with
/// x[feature] < threshold go left. Leaves have feature == -1 and carry
/// `outputs` values.
struct Tree {
  std::vector<int> feature;
  std::vector<double> threshold;
  std::vector<int> left;
  std::vector<int> right;
  std::vector<double> value;
  std::size_t outputs = 1;

  std::size_t node_count() const noexcept { return feature.size(); }
  bool is_leaf(std::size_t n) const noexcept { return feature[n] < 0; }

  std::size_t leaf_index(std::span<const double> x) const {
    std::size_t n = 0;
    while (feature[n] >= 0) {
      n = static_cast<std::size_t>(x[static_cast<std::size_t>(feature[n])] < threshold[n] ? left[n] : right[n]);
    }
    return n;
  }
  double predict(std::span<const double> x) const { return value[leaf_index(x) * outputs]; }
  std::span<const double> values(std::size_t node) const { return {value.data() + node * outputs, outputs}; }
  std::span<double> values(std::size_t node) { return {value.data() + node * outputs, outputs}; }

  /// Depth of the deepest leaf (root alone = 0).
  int depth() const {
    if (feature.empty()) return 0;
    int best = 0;
    std::vector<std::pair<std::size_t, int>> stack{{0, 0}};
    while (!stack.empty()) {
      auto [n, d] = stack.back();
      stack.pop_back();
      best = std::max(best, d);
      if (!is_leaf(n)) {
        stack.emplace_back(static_cast<std::size_t>(left[n]), d + 1);
        stack.emplace_back(static_cast<std::size_t>(right[n]), d + 1);
      }
    }
    return best;
  }

  std::size_t add_node(std::span<const double> v) {
    feature.push_back(-1);
    threshold.push_back(0.0);
    left.push_back(-1);
    right.push_back(-1);
    value.insert(value.end(), v.begin(), v.end());
    return feature.size() - 1;
  }
};

// Serialized form of a single-output tree: internal node
// [feature, threshold, left, right], leaf [value].
inline nlohmann::json tree_to_json(const Tree& t) {
  if (t.outputs != 1) throw FormatError("only single-output trees are serializable");
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t n = 0; n < t.node_count(); ++n) {
    if (t.is_leaf(n)) nodes.push_back(nlohmann::json::array({t.value[n]}));
    else nodes.push_back(nlohmann::json::array({t.feature[n], t.threshold[n], t.left[n], t.right[n]}));
  }
  return nodes;
}

inline Tree tree_from_json(const nlohmann::json& nodes, std::size_t width) {
  if (!nodes.is_array() || nodes.empty()) throw FormatError("tree has no nodes");
  Tree t;
  const double zero = 0.0;
  for (const auto& node : nodes) {
    if (!node.is_array()) throw FormatError("tree node must be an array");
    if (node.size() == 4) {
      const std::size_t n = t.add_node({&zero, 1});
      t.feature[n] = node[0].get<int>();
      t.threshold[n] = node[1].get<double>();
      t.left[n] = node[2].get<int>();
      t.right[n] = node[3].get<int>();
    } else if (node.size() == 1) {
      const double v = node[0].get<double>();
      t.add_node({&v, 1});
    } else {
      throw FormatError("tree node has unexpected arity");
    }
  }
  const auto count = static_cast<int>(t.node_count());
  for (std::size_t n = 0; n < t.node_count(); ++n) {
    if (t.is_leaf(n)) continue;
    const int self = static_cast<int>(n);
    if (t.feature[n] < 0 || t.feature[n] >= static_cast<int>(width) || t.left[n] <= self ||
        t.right[n] <= self || t.left[n] >= count || t.right[n] >= count)
      throw FormatError("tree node has invalid links");
  }
  return t;
}

/// Per-feature row orders (ascending value) with the sorted values alongside,
/// computed once per training matrix and shared by every tree fitted on it.
class SortedColumns {
 public:
  explicit SortedColumns(const Matrix& x) : rows_(x.rows()), order_(x.cols()), values_(x.cols()) {
    for (std::size_t f = 0; f < x.cols(); ++f) {
      auto& ord = order_[f];
      ord.resize(rows_);
      std::iota(ord.begin(), ord.end(), 0u);
      std::stable_sort(ord.begin(), ord.end(), [&](std::uint32_t a, std::uint32_t b) { return x(a, f) < x(b, f); });
      auto& val = values_[f];
      val.resize(rows_);
      for (std::size_t k = 0; k < rows_; ++k) val[k] = x(ord[k], f);
    }
  }
  std::size_t features() const noexcept { return order_.size(); }
  std::size_t rows() const noexcept { return rows_; }
  std::span<const std::uint32_t> order(std::size_t f) const { return order_[f]; }
  std::span<const double> values(std::size_t f) const { return values_[f]; }

 private:
  std::size_t rows_;
  std::vector<std::vector<std::uint32_t>> order_;
  std::vector<std::vector<double>> values_;
};

struct TreeParams {
  int max_depth = 6;  // negative: unlimited
  std::size_t min_samples_leaf = 1;
  std::size_t max_features = 0;  // per-node feature subsample size; 0: all
};

/// Fits a squared-error regression tree to the n x q targets `y` (row-major,
/// q = outputs) by exact greedy search over midpoints of sorted distinct
/// values. With one-hot targets the criterion equals Gini impurity decrease.
/// Rows with zero weight are ignored. Leaves hold the weighted target mean.
/// `leaf_of_row`, when given, receives the leaf of every active row (-1 for
/// inactive rows). Gain ties go to the lower feature, then lower threshold.
class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const SortedColumns& sorted) : x_(x), sorted_(sorted) {}

  Tree build(std::span<const double> y, std::size_t outputs, std::span<const double> weights,
             const TreeParams& params, Rng* rng = nullptr, std::vector<int>* leaf_of_row = nullptr) const {
    if (outputs == 1) return build_impl<true>(y, 1, weights, params, rng, leaf_of_row);
    return build_impl<false>(y, outputs, weights, params, rng, leaf_of_row);
  }

 private:
  struct Best {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
  };

  template <bool kSingle>
  Tree build_impl(std::span<const double> y, std::size_t q, std::span<const double> weights,
                  const TreeParams& params, Rng* rng, std::vector<int>* leaf_of_row) const {
    const std::size_t n = x_.rows();
    const std::size_t d = x_.cols();
    const std::size_t msl = std::max<std::size_t>(1, params.min_samples_leaf);
    const bool weighted = !weights.empty();
    auto w_of = [&](std::size_t i) { return weighted ? weights[i] : 1.0; };
    auto y_of = [&](std::size_t i, std::size_t k) { return kSingle ? y[i] : y[i * q + k]; };

    Tree tree;
    tree.outputs = q;
    std::vector<double> zeros(q, 0.0);
    tree.add_node(zeros);

    std::vector<int> pos(n, -1);  // slot within the current frontier
    for (std::size_t i = 0; i < n; ++i)
      if (w_of(i) > 0.0) pos[i] = 0;
    std::vector<int> leaf(n, -1);
    std::vector<std::size_t> frontier{0};

    std::vector<double> tot_w, tot_s, tot_ss, run_w, run_s, last_x;
    std::vector<std::size_t> tot_n, run_n;
    std::vector<Best> best;
    std::vector<char> allowed;  // frontier.size() x d, only with subsampling
    const bool subsample = params.max_features > 0 && params.max_features < d;

    for (int depth = 0; !frontier.empty(); ++depth) {
      const std::size_t slots = frontier.size();
      tot_w.assign(slots, 0.0);
      tot_s.assign(slots * q, 0.0);
      tot_ss.assign(slots, 0.0);
      tot_n.assign(slots, 0);
      for (std::size_t i = 0; i < n; ++i) {
        if (pos[i] < 0) continue;
        const auto s = static_cast<std::size_t>(pos[i]);
        const double w = w_of(i);
        tot_w[s] += w;
        tot_n[s] += 1;
        for (std::size_t k = 0; k < q; ++k) {
          const double v = y_of(i, k);
          tot_s[s * q + k] += w * v;
          tot_ss[s] += w * v * v;
        }
      }
      for (std::size_t s = 0; s < slots; ++s) {
        auto vals = tree.values(frontier[s]);
        for (std::size_t k = 0; k < q; ++k) vals[k] = tot_w[s] > 0.0 ? tot_s[s * q + k] / tot_w[s] : 0.0;
      }

      const bool at_limit = params.max_depth >= 0 && depth >= params.max_depth;
      best.assign(slots, Best{});
      if (!at_limit && d > 0) {
        if (subsample) {
          allowed.assign(slots * d, 0);
          std::vector<std::size_t> feats(d);
          for (std::size_t s = 0; s < slots; ++s) {
            std::iota(feats.begin(), feats.end(), 0);
            // Partial Fisher-Yates: first max_features entries are the draw.
            for (std::size_t k = 0; k < params.max_features; ++k) {
              const auto j = k + static_cast<std::size_t>(rng->below(d - k));
              std::swap(feats[k], feats[j]);
              allowed[s * d + feats[k]] = 1;
            }
          }
        }
        std::vector<double> parent_term(slots, 0.0);
        for (std::size_t s = 0; s < slots; ++s) {
          best[s].gain = 1e-12 * tot_ss[s] + 1e-300;
          for (std::size_t k = 0; k < q; ++k) parent_term[s] += tot_s[s * q + k] * tot_s[s * q + k];
          parent_term[s] /= tot_w[s] > 0.0 ? tot_w[s] : 1.0;
        }
        for (std::size_t f = 0; f < d; ++f) {
          run_w.assign(slots, 0.0);
          run_s.assign(slots * q, 0.0);
          run_n.assign(slots, 0);
          last_x.assign(slots, 0.0);
          const auto order = sorted_.order(f);
          const auto values = sorted_.values(f);
          for (std::size_t r = 0; r < n; ++r) {
            const std::uint32_t i = order[r];
            const int ps = pos[i];
            if (ps < 0) continue;
            const auto s = static_cast<std::size_t>(ps);
            if (subsample && !allowed[s * d + f]) continue;
            const double xv = values[r];
            if (run_n[s] >= msl && xv > last_x[s] && tot_n[s] - run_n[s] >= msl) {
              const double wl = run_w[s];
              const double wr = tot_w[s] - wl;
              if (wl > 0.0 && wr > 0.0) {
                double gain;
                if constexpr (kSingle) {
                  const double sl = run_s[s];
                  const double sr = tot_s[s] - sl;
                  gain = sl * sl / wl + sr * sr / wr - parent_term[s];
                } else {
                  double gl = 0.0, gr = 0.0;
                  for (std::size_t k = 0; k < q; ++k) {
                    const double sl = run_s[s * q + k];
                    const double sr = tot_s[s * q + k] - sl;
                    gl += sl * sl;
                    gr += sr * sr;
                  }
                  gain = gl / wl + gr / wr - parent_term[s];
                }
                if (gain > best[s].gain) {
                  double thr = 0.5 * (last_x[s] + xv);
                  if (!(thr > last_x[s])) thr = xv;
                  best[s] = Best{gain, static_cast<int>(f), thr};
                }
              }
            }
            const double w = w_of(i);
            run_w[s] += w;
            run_n[s] += 1;
            for (std::size_t k = 0; k < q; ++k) run_s[s * q + k] += w * y_of(i, k);
            last_x[s] = xv;
          }
        }
      }

      // Grow the next frontier.
      std::vector<std::size_t> next;
      std::vector<int> left_slot(slots, -1);
      for (std::size_t s = 0; s < slots; ++s) {
        if (best[s].feature < 0) continue;
        const std::size_t node = frontier[s];
        const std::size_t l = tree.add_node(zeros);
        const std::size_t r = tree.add_node(zeros);
        tree.feature[node] = best[s].feature;
        tree.threshold[node] = best[s].threshold;
        tree.left[node] = static_cast<int>(l);
        tree.right[node] = static_cast<int>(r);
        left_slot[s] = static_cast<int>(next.size());
        next.push_back(l);
        next.push_back(r);
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (pos[i] < 0) continue;
        const auto s = static_cast<std::size_t>(pos[i]);
        if (best[s].feature < 0) {
          leaf[i] = static_cast<int>(frontier[s]);
          pos[i] = -1;
        } else {
          const bool go_left = x_(i, static_cast<std::size_t>(best[s].feature)) < best[s].threshold;
          pos[i] = left_slot[s] + (go_left ? 0 : 1);
        }
      }
      frontier = std::move(next);
    }
    if (leaf_of_row) *leaf_of_row = std::move(leaf);
    return tree;
  }

  const Matrix& x_;
  const SortedColumns& sorted_;
};

}  // namespace s3f::gbt
