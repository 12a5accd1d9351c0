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

#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "s3f/metrics.hpp"
#include "oracles.hpp"

namespace s3f {
namespace {

using oracle::assignment_min_cost;
using oracle::l1;
using oracle::transport_oracle;

Matrix random_points(std::size_t n, std::size_t d, Rng& rng) {
  Matrix x(n, d);
  for (auto& v : x.data()) v = rng.normal();
  return x;
}

double brute_force_equal_size(const Matrix& a, const Matrix& b) {
  std::vector<std::size_t> perm(a.rows());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) s += l1(a.row(i), b.row(perm[i]));
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(a.rows());
}

TEST(Oracle, HungarianAgreesWithPermutationSearch) {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng.below(7);
    const Matrix a = random_points(n, 2, rng), b = random_points(n, 2, rng);
    EXPECT_NEAR(transport_oracle(a, b), brute_force_equal_size(a, b), 1e-12);
  }
}

TEST(Wasserstein, MatchesExactOracleOnRandomInstances) {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + rng.below(6), p = 1 + rng.below(6), d = 1 + rng.below(3);
    const Matrix a = random_points(m, d, rng), b = random_points(p, d, rng);
    EXPECT_NEAR(wasserstein1(a, b), transport_oracle(a, b), 1e-9) << "trial " << trial;
  }
}

TEST(Wasserstein, HandlesTiesAndDuplicatePoints) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + rng.below(6), p = 1 + rng.below(6);
    Matrix a(m, 2), b(p, 2);
    for (auto& v : a.data()) v = static_cast<double>(rng.below(3));
    for (auto& v : b.data()) v = static_cast<double>(rng.below(3));
    EXPECT_NEAR(wasserstein1(a, b), transport_oracle(a, b), 1e-9);
  }
}

TEST(Wasserstein, TrivialCases) {
  Matrix a(1, 1), b(1, 1);
  b(0, 0) = 1.0;
  EXPECT_EQ(wasserstein1(a, b), 1.0);
  Rng rng(1);
  const Matrix x = random_points(40, 3, rng);
  std::vector<std::size_t> rev(40);
  std::iota(rev.rbegin(), rev.rend(), 0);
  EXPECT_EQ(wasserstein1(x, x.select_rows(rev)), 0.0);
}

TEST(Wasserstein, IsSymmetricAndSatisfiesTriangleInequality) {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix a = random_points(8, 2, rng), b = random_points(8, 2, rng), c = random_points(8, 2, rng);
    const double ab = wasserstein1(a, b), ba = wasserstein1(b, a);
    EXPECT_NEAR(ab, ba, 1e-12);
    EXPECT_LE(wasserstein1(a, c), ab + wasserstein1(b, c) + 1e-9);
    EXPECT_GT(ab, 0.0);
  }
}

TEST(Wasserstein, OneDimensionalMatchesSortedCoupling) {
  // Equal-size 1-D sets: the optimal coupling pairs order statistics.
  Rng rng(3);
  for (std::size_t n : {50u, 200u}) {
    Matrix a = random_points(n, 1, rng), b = random_points(n, 1, rng);
    auto xa = a.col(0), xb = b.col(0);
    std::sort(xa.begin(), xa.end());
    std::sort(xb.begin(), xb.end());
    double expect = 0.0;
    for (std::size_t i = 0; i < n; ++i) expect += std::abs(xa[i] - xb[i]);
    EXPECT_NEAR(wasserstein1(a, b), expect / static_cast<double>(n), 1e-9);
  }
}

TEST(Wasserstein, Errors) {
  EXPECT_THROW(wasserstein1(Matrix(2, 2), Matrix(2, 3)), SchemaError);
  EXPECT_THROW(wasserstein1(Matrix(0, 2), Matrix(2, 2)), ArgumentError);
  EXPECT_THROW(wasserstein1(Matrix(11, 1), Matrix(2, 1), 10), SizeError);
}

TEST(Wasserstein, FullSizeProblemIsTractable) {
  Rng rng(9);
  const Matrix a = random_points(1000, 6, rng), b = random_points(1000, 6, rng);
  const auto t0 = std::chrono::steady_clock::now();
  const double w = wasserstein1(a, b);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_GT(w, 0.0);
  EXPECT_LT(secs, 20.0);
}

TEST(Coverage, TrivialCases) {
  Rng rng(4);
  const Matrix real = random_points(30, 2, rng);
  EXPECT_EQ(coverage(real, real), 1.0);
  Matrix far = real;
  for (auto& v : far.data()) v += 1e6;
  EXPECT_EQ(coverage(real, far), 0.0);
  EXPECT_THROW(coverage(random_points(5, 2, rng), real, 5), ArgumentError);
}

TEST(Coverage, HandCheckedRadii) {
  // Radii with k = 1 are all 1; the fake point 0.1 lies within 1 of both
  // 0 (distance 0.1) and 1 (distance 0.9) and is farther from the rest.
  Matrix real(6, 1), fake(1, 1);
  for (std::size_t i = 0; i < 6; ++i) real(i, 0) = static_cast<double>(i);
  fake(0, 0) = 0.1;
  EXPECT_NEAR(coverage(real, fake, 1), 2.0 / 6.0, 1e-15);
  // k = 3: radii are 3 at the ends and 2 inside; 0, 1 and 2 (distance 1.9)
  // are covered.
  EXPECT_NEAR(coverage(real, fake, 3), 3.0 / 6.0, 1e-15);
}

TEST(Coverage, NeverDecreasesWhenFakePointsAreAdded) {
  Rng rng(6);
  const Matrix real = random_points(60, 3, rng);
  Matrix fake(0, 3);
  double prev = 0.0;
  for (int step = 0; step < 20; ++step) {
    fake.append_rows(random_points(3, 3, rng));
    const double c = coverage(real, fake);
    EXPECT_GE(c, prev);
    EXPECT_GE(c, 0.0);
    EXPECT_LE(c, 1.0);
    prev = c;
  }
}

DataTable mixed_table(std::size_t n, std::uint64_t seed) {
  DataTable t;
  t.schema.columns = {{"a", ColumnKind::Continuous, {}},
                      {"b", ColumnKind::Categorical, {"p", "q", "r"}},
                      {"y", ColumnKind::Categorical, {"no", "yes"}}};
  t.schema.target = 2;
  t.cells = Matrix(n, 3);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    t.cells(i, 0) = 10.0 * rng.normal();
    t.cells(i, 1) = static_cast<double>(rng.below(3));
    t.cells(i, 2) = t.cells(i, 0) + 5.0 * (t.cells(i, 1) - 1.0) > 0.0 ? 1.0 : 0.0;
  }
  return t;
}

TEST(EvaluationSpace, IsInvariantToCategoryRelabeling) {
  const DataTable x = mixed_table(30, 1), y = mixed_table(25, 2);
  const ScalerState ranges = minmax_fit(x);
  const double w = wasserstein1(evaluation_matrix(x, ranges), evaluation_matrix(y, ranges));
  const double c = coverage(evaluation_matrix(x, ranges), evaluation_matrix(y, ranges));
  // Permute the levels of column b: p->r, q->p, r->q.
  auto relabel = [](DataTable t) {
    const double to[3] = {2.0, 0.0, 1.0};
    for (std::size_t r = 0; r < t.rows(); ++r) t.cells(r, 1) = to[static_cast<std::size_t>(t.cells(r, 1))];
    t.schema.columns[1].levels = {"q", "r", "p"};
    return t;
  };
  const DataTable rx = relabel(x), ry = relabel(y);
  const ScalerState rr = minmax_fit(rx);
  EXPECT_NEAR(wasserstein1(evaluation_matrix(rx, rr), evaluation_matrix(ry, rr)), w, 1e-12);
  EXPECT_EQ(coverage(evaluation_matrix(rx, rr), evaluation_matrix(ry, rr)), c);
}

TEST(EvaluationSpace, CategoricalMismatchCostsTwo) {
  DataTable a = mixed_table(1, 1), b = a;
  b.cells(0, 1) = std::fmod(a.cells(0, 1) + 1.0, 3.0);
  const ScalerState ranges = minmax_fit(a);
  EXPECT_EQ(wasserstein1(evaluation_matrix(a, ranges), evaluation_matrix(b, ranges)), 2.0);
}

TEST(Efficacy, FakeEqualToRealReproducesBaseline) {
  const DataTable train = mixed_table(120, 3), test = mixed_table(60, 4);
  const double base = gbt::evaluate_panel(train, test, gbt::Task::Classification);
  const auto s = efficacy(train, train, test, gbt::Task::Classification);
  EXPECT_EQ(s.fake, base);
  DataTable empty = train;
  empty.cells = Matrix(0, 3);
  const auto e = efficacy(empty, train, test, gbt::Task::Classification);
  EXPECT_EQ(e.combined, base);
  EXPECT_TRUE(std::isnan(e.fake));
}

TEST(Efficacy, LabelShuffledIrisScoresBelowBaseline) {
  const auto iris = load_csv(std::string(S3F_TEST_DATA) + "/iris.csv");
  const auto [train, test] = split(iris, 0.2, 42, true);
  const double base = gbt::evaluate_panel(train, test, gbt::Task::Classification);
  DataTable shuffled = train;
  auto labels = train.cells.col(4);
  Rng rng(8);
  rng.shuffle(labels.begin(), labels.end());
  shuffled.cells.set_col(4, labels);
  EXPECT_LT(efficacy(shuffled, train, test, gbt::Task::Classification).fake, base);
}

TEST(Report, FakeEqualToTrainGivesZeroDistance) {
  const DataTable train = mixed_table(80, 5), test = mixed_table(40, 6);
  auto r = full_report(train, test, train, 1.5);
  EXPECT_EQ(r.w_train, 0.0);
  EXPECT_EQ(r.coverage_train, 1.0);
  EXPECT_GT(r.w_test, 0.0);
  EXPECT_EQ(r.score_kind, "f1");
  EXPECT_EQ(r.seconds, 1.5);
  r.dataset = "mixed";
  r.method = "HS3F";
  r.solver = "euler";
  EXPECT_EQ(std::string(MetricsReport::csv_header).substr(0, 21), "dataset,method,solver");
  EXPECT_EQ(r.csv_row().substr(0, 19), "mixed,HS3F,euler,0,");
  EXPECT_EQ(r.to_json()["W_tr"], 0.0);
  EXPECT_THROW(full_report(train, test, train, -1.0), ArgumentError);
}

TEST(Report, SubsamplesLargeSetsBeforeTransport) {
  const DataTable train = mixed_table(300, 7), test = mixed_table(100, 8), fake = mixed_table(300, 9);
  MetricsOptions opts;
  opts.ot_max_points = 50;
  const auto r = full_report(train, test, fake, 0.0, opts);
  EXPECT_TRUE(std::isfinite(r.w_train));
  EXPECT_GT(r.w_train, 0.0);
  EXPECT_EQ(full_report(train, test, fake, 0.0, opts).csv_row(), r.csv_row());
}

}  // namespace
}  // namespace s3f
