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
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "s3f/error.hpp"
#include "s3f/gbt/boosting.hpp"
#include "s3f/matrix.hpp"
#include "s3f/parallel.hpp"
#include "s3f/rng.hpp"
#include "s3f/solver.hpp"
#include "s3f/tabular.hpp"

namespace s3f {

enum class Method { FF, CS3F, HS3F };
enum class Conditioning { None, PerLabel };

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::FF: return "FF";
    case Method::CS3F: return "CS3F";
    case Method::HS3F: return "HS3F";
  }
  return "?";
}

inline std::optional<Method> try_parse_method(std::string_view s) {
  if (s == "FF" || s == "ff") return Method::FF;
  if (s == "CS3F" || s == "cs3f") return Method::CS3F;
  if (s == "HS3F" || s == "hs3f") return Method::HS3F;
  return std::nullopt;
}

inline Method parse_method(std::string_view s) {
  if (auto m = try_parse_method(s)) return *m;
  throw ArgumentError("unknown method '" + std::string(s) + "'");
}

inline std::string_view conditioning_name(Conditioning c) { return c == Conditioning::None ? "none" : "per_label"; }

inline Conditioning parse_conditioning(std::string_view s) {
  if (s == "none") return Conditioning::None;
  if (s == "per_label") return Conditioning::PerLabel;
  throw ArgumentError("unknown conditioning '" + std::string(s) + "'");
}

struct FlowTrainingPlan {
  Method method = Method::HS3F;
  int duplication = 100;
  TimeGrid grid;
  std::vector<std::size_t> feature_order;  // empty: default order
  Conditioning conditioning = Conditioning::None;
  double sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    grid.validate();
    if (duplication < 1) throw ArgumentError("duplication must be at least 1");
    if (sigma != 0.0) throw ArgumentError("only sigma = 0 probability paths are supported");
  }

  friend bool operator==(const FlowTrainingPlan&, const FlowTrainingPlan&) = default;
};

inline nlohmann::json plan_to_json(const FlowTrainingPlan& p) {
  return {{"method", method_name(p.method)},
          {"duplication", p.duplication},
          {"n_s", p.grid.n_s},
          {"feature_order", p.feature_order},
          {"conditioning", conditioning_name(p.conditioning)},
          {"sigma", p.sigma},
          {"seed", p.seed}};
}

inline FlowTrainingPlan plan_from_json(const nlohmann::json& j) {
  try {
    FlowTrainingPlan p;
    const auto tag = j.at("method").get<std::string>();
    const auto m = try_parse_method(tag);
    if (!m) throw FormatError("unknown method tag '" + tag + "'");
    p.method = *m;
    p.duplication = j.at("duplication").get<int>();
    p.grid.n_s = j.at("n_s").get<int>();
    p.feature_order = j.at("feature_order").get<std::vector<std::size_t>>();
    const auto cond = j.at("conditioning").get<std::string>();
    if (cond == "none") p.conditioning = Conditioning::None;
    else if (cond == "per_label") p.conditioning = Conditioning::PerLabel;
    else throw FormatError("unknown conditioning tag '" + cond + "'");
    p.sigma = j.at("sigma").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("corrupt plan: ") + e.what());
  }
}

/// Columns produced by the flow, in generation order. Without an explicit
/// order: non-target columns in schema order, then the target unless labels
/// are handled by per-label conditioning.
inline std::vector<std::size_t> resolve_feature_order(const TableSchema& schema, const FlowTrainingPlan& plan) {
  if (plan.conditioning == Conditioning::PerLabel &&
      !(schema.target && schema.columns[*schema.target].categorical()))
    throw ArgumentError("per-label conditioning needs a categorical target");
  std::vector<std::size_t> expected = schema.feature_indices();
  if (schema.target && plan.conditioning == Conditioning::None) expected.push_back(*schema.target);
  if (plan.feature_order.empty()) return expected;
  std::vector<std::size_t> a = plan.feature_order, b = expected;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) throw ArgumentError("feature_order is not a permutation of the generated columns");
  return plan.feature_order;
}

/// Rejects feature kinds a method cannot model.
inline void check_method_supports(const TableSchema& schema, std::span<const std::size_t> order, Method method) {
  if (method != Method::CS3F) return;
  for (auto c : order)
    if (schema.columns[c].categorical())
      throw ModeError("CS3F models continuous features only; column '" + schema.columns[c].name +
                      "' is categorical (use HS3F or FF)");
}

/// Noise/data pairs of the flow training problem and the per-(output, level)
/// regression designs built from them.
///
/// Sequential layout: columns of `data` follow the feature order (categorical
/// cells as codes); outputs are the continuous positions. Joint layout: the
/// one-hot encoding of the ordered columns; every column is an output.
class TrainingSet {
 public:
  TrainingSet(Matrix noise, Matrix data, std::vector<std::size_t> outputs, bool joint, TimeGrid grid)
      : x0_(std::move(noise)), x1_(std::move(data)), outputs_(std::move(outputs)), joint_(joint), grid_(grid) {
    if (x0_.rows() != x1_.rows() || x0_.cols() != x1_.cols()) throw SchemaError("noise and data shapes differ");
    for (auto o : outputs_)
      if (o >= x1_.cols()) throw SchemaError("output column out of range");
  }

  /// Duplicates every row `duplication` times and pairs each duplicated
  /// cell of an output column with one standard-normal draw.
  static TrainingSet build(const DataTable& table, std::span<const std::size_t> order, Method method,
                           int duplication, TimeGrid grid, Rng& rng) {
    if (!table.scaled) throw StateError("flow training needs a min-max scaled table");
    if (duplication < 1) throw ArgumentError("duplication must be at least 1");
    check_method_supports(table.schema, order, method);
    const bool joint = method == Method::FF;
    const DataTable ordered = select_columns(table, order);
    Matrix base = joint ? one_hot_encode(ordered).first : ordered.cells;
    std::vector<std::size_t> outputs;
    for (std::size_t c = 0; c < base.cols(); ++c)
      if (joint || !ordered.schema.columns[c].categorical()) outputs.push_back(c);

    const std::size_t n = base.rows(), k = outputs.empty() ? 1 : static_cast<std::size_t>(duplication);
    std::vector<std::size_t> idx(n * k);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t d = 0; d < k; ++d) idx[r * k + d] = r;
    Matrix x1 = base.select_rows(idx);
    Matrix x0(x1.rows(), x1.cols());
    for (std::size_t r = 0; r < x0.rows(); ++r)
      for (auto o : outputs) x0(r, o) = rng.normal();
    return TrainingSet(std::move(x0), std::move(x1), std::move(outputs), joint, grid);
  }

  std::size_t rows() const noexcept { return x1_.rows(); }
  std::size_t outputs() const noexcept { return outputs_.size(); }
  std::size_t output_column(std::size_t o) const { return outputs_.at(o); }
  bool joint() const noexcept { return joint_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  const Matrix& noise() const noexcept { return x0_; }
  const Matrix& data() const noexcept { return x1_; }

  /// (1 - t) x0 + t x1 over every column at level `level`.
  Matrix flowed(std::size_t level) const {
    const double t = grid_.time(level);
    Matrix out(x1_.rows(), x1_.cols());
    auto o = out.data();
    const auto a = x0_.data(), b = x1_.data();
    for (std::size_t k = 0; k < o.size(); ++k) o[k] = (1.0 - t) * a[k] + t * b[k];
    return out;
  }

  /// Regression inputs for output `o` at `level`. Joint: the flowed matrix.
  /// Sequential: the flowed output column followed by the data columns that
  /// precede it in the feature order.
  Matrix design(std::size_t o, std::size_t level) const {
    if (level >= grid_.levels()) throw ArgumentError("level out of range");
    if (joint_) return flowed(level);
    const std::size_t pos = outputs_.at(o);
    const double t = grid_.time(level);
    Matrix out(x1_.rows(), 1 + pos);
    for (std::size_t r = 0; r < x1_.rows(); ++r) {
      out(r, 0) = (1.0 - t) * x0_(r, pos) + t * x1_(r, pos);
      for (std::size_t c = 0; c < pos; ++c) out(r, 1 + c) = x1_(r, c);
    }
    return out;
  }

  /// Velocity target x1 - x0 of output `o`; the same at every level.
  std::vector<double> target(std::size_t o) const {
    const std::size_t c = outputs_.at(o);
    std::vector<double> y(x1_.rows());
    for (std::size_t r = 0; r < y.size(); ++r) y[r] = x1_(r, c) - x0_(r, c);
    return y;
  }

 private:
  Matrix x0_, x1_;
  std::vector<std::size_t> outputs_;
  bool joint_ = false;
  TimeGrid grid_;
};

struct FlowGbtParams {
  gbt::GbtParams regressor = gbt::GbtParams::regressor_defaults();
  gbt::GbtParams classifier = gbt::GbtParams::classifier_defaults();
};

/// Models of one training partition (the whole table, or one label).
struct SubBank {
  std::size_t rows = 0;
  std::vector<std::size_t> outputs;  // ordered position (sequential) or one-hot column (joint) per output
  std::vector<std::vector<gbt::GbtRegressor>> regressors;       // [output][level]
  std::vector<std::optional<gbt::GbtClassifier>> classifiers;   // [ordered position], HS3F categorical only
  std::vector<double> first_frequencies;  // first ordered feature sampled without a classifier
};

struct VelocityModelBank {
  FlowTrainingPlan plan;  // feature_order resolved
  TableSchema schema;
  ScalerState scaler;
  FlowGbtParams params;
  std::vector<double> label_frequencies;  // per label code, per-label conditioning only
  std::vector<SubBank> banks;

  std::size_t regressor_count() const {
    std::size_t n = 0;
    for (const auto& b : banks)
      for (const auto& r : b.regressors) n += r.size();
    return n;
  }
  std::size_t classifier_count() const {
    std::size_t n = 0;
    for (const auto& b : banks)
      for (const auto& c : b.classifiers) n += c.has_value();
    return n;
  }
  /// Schema of the generated columns in feature order.
  TableSchema ordered_schema() const {
    TableSchema s;
    for (auto c : plan.feature_order) s.columns.push_back(schema.columns[c]);
    return s;
  }
};

namespace detail {

inline std::vector<double> code_frequencies(std::span<const double> codes, std::size_t cardinality) {
  std::vector<double> f(cardinality, 0.0);
  for (double v : codes) f[static_cast<std::size_t>(v)] += 1.0;
  for (auto& v : f) v /= static_cast<double>(codes.size());
  return f;
}

}  // namespace detail

/// Trains the velocity regressors (and HS3F classifiers) on a scaled table.
inline VelocityModelBank train_bank(const DataTable& table, const ScalerState& scaler, FlowTrainingPlan plan,
                                    const FlowGbtParams& params = {}) {
  plan.validate();
  params.regressor.validate();
  params.classifier.validate();
  if (!table.scaled) throw StateError("flow training needs a min-max scaled table");
  scaler.check_matches(table.schema);
  if (table.rows() == 0) throw ArgumentError("cannot train on an empty table");
  plan.feature_order = resolve_feature_order(table.schema, plan);
  check_method_supports(table.schema, plan.feature_order, plan.method);

  VelocityModelBank bank;
  bank.plan = plan;
  bank.schema = table.schema;
  bank.scaler = scaler;
  bank.params = params;

  std::vector<DataTable> parts;
  if (plan.conditioning == Conditioning::PerLabel) {
    const std::size_t t = *table.schema.target;
    const std::size_t k = table.schema.columns[t].cardinality();
    std::vector<std::vector<std::size_t>> idx(k);
    for (std::size_t r = 0; r < table.rows(); ++r) idx[static_cast<std::size_t>(table.cells(r, t))].push_back(r);
    bank.label_frequencies = detail::code_frequencies(table.cells.col(t), k);
    for (const auto& rows : idx) parts.push_back(select_rows(table, rows));
  } else {
    parts.push_back(table);
  }

  const auto& order = plan.feature_order;
  std::vector<TrainingSet> sets;
  bank.banks.resize(parts.size());
  for (std::size_t b = 0; b < parts.size(); ++b) {
    Rng rng(mix_seed(plan.seed, b));
    sets.push_back(TrainingSet::build(parts[b], order, plan.method, plan.duplication, plan.grid, rng));
    auto& sub = bank.banks[b];
    sub.rows = parts[b].rows();
    if (sub.rows == 0) continue;
    for (std::size_t o = 0; o < sets[b].outputs(); ++o) sub.outputs.push_back(sets[b].output_column(o));
    sub.regressors.assign(sets[b].outputs(), std::vector<gbt::GbtRegressor>(plan.grid.levels()));
    sub.classifiers.assign(order.size(), std::nullopt);
    if (plan.method == Method::HS3F && plan.conditioning == Conditioning::None && !order.empty() &&
        table.schema.columns[order[0]].categorical())
      sub.first_frequencies =
          detail::code_frequencies(parts[b].cells.col(order[0]), table.schema.columns[order[0]].cardinality());
  }

  struct Task {
    std::size_t bank, index, level;
    bool classifier;
  };
  std::vector<Task> tasks;
  for (std::size_t b = 0; b < parts.size(); ++b) {
    if (bank.banks[b].rows == 0) continue;
    for (std::size_t o = 0; o < sets[b].outputs(); ++o)
      for (std::size_t i = 0; i < plan.grid.levels(); ++i) tasks.push_back({b, o, i, false});
    if (plan.method != Method::HS3F) continue;
    for (std::size_t q = 0; q < order.size(); ++q) {
      if (!table.schema.columns[order[q]].categorical()) continue;
      if (q == 0 && !bank.banks[b].first_frequencies.empty()) continue;
      tasks.push_back({b, q, 0, true});
    }
  }

  parallel_for(tasks.size(), [&](std::size_t k) {
    const Task& task = tasks[k];
    auto& sub = bank.banks[task.bank];
    if (!task.classifier) {
      const auto& set = sets[task.bank];
      sub.regressors[task.index][task.level] =
          gbt::fit_regressor(set.design(task.index, task.level), set.target(task.index), params.regressor);
      return;
    }
    // Classifier on the true values of the previously ordered features.
    const DataTable& part = parts[task.bank];
    const std::size_t q = task.index;
    Matrix x(part.rows(), q);
    std::vector<std::size_t> y(part.rows());
    for (std::size_t r = 0; r < part.rows(); ++r) {
      for (std::size_t c = 0; c < q; ++c) x(r, c) = part.cells(r, order[c]);
      y[r] = static_cast<std::size_t>(part.cells(r, order[q]));
    }
    sub.classifiers[q] =
        gbt::fit_classifier(x, y, params.classifier, table.schema.columns[order[q]].cardinality());
  });
  return bank;
}

/// Scales `train` with its own ranges and trains a bank on it.
inline VelocityModelBank fit_bank(const DataTable& train, const FlowTrainingPlan& plan,
                                  const FlowGbtParams& params = {}) {
  const auto [scaled, scaler] = minmax_fit_transform(train);
  return train_bank(scaled, scaler, plan, params);
}

// ---------------------------------------------------------------------------
// Persistence

inline constexpr std::string_view bank_format_version = "s3f-bank/1";

namespace detail {

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write '" + path.string() + "'");
  out << j.dump() << '\n';
  if (!out) throw ArgumentError("failed writing '" + path.string() + "'");
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("missing file '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("corrupt file '" + path.string() + "': " + e.what());
  }
}

inline std::filesystem::path sub_bank_dir(const std::filesystem::path& dir, const VelocityModelBank& bank,
                                          std::size_t b) {
  return bank.plan.conditioning == Conditioning::PerLabel ? dir / ("label_" + std::to_string(b)) : dir;
}

}  // namespace detail

/// Writes `manifest.json` plus one file per model (`f{k}_t{i}.json` for
/// output k at level i, `c{k}.json` for the classifier at ordered position
/// k), in a `label_{code}` subdirectory per label when conditioned.
inline void save_bank(const VelocityModelBank& bank, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json subs = nlohmann::json::array();
  for (std::size_t b = 0; b < bank.banks.size(); ++b) {
    const auto& sub = bank.banks[b];
    const auto sdir = detail::sub_bank_dir(dir, bank, b);
    std::filesystem::create_directories(sdir);
    std::vector<std::size_t> classifiers;
    for (std::size_t q = 0; q < sub.classifiers.size(); ++q) {
      if (!sub.classifiers[q]) continue;
      classifiers.push_back(q);
      detail::write_json(sdir / ("c" + std::to_string(q) + ".json"), sub.classifiers[q]->to_json());
    }
    for (std::size_t o = 0; o < sub.regressors.size(); ++o)
      for (std::size_t i = 0; i < sub.regressors[o].size(); ++i)
        detail::write_json(sdir / ("f" + std::to_string(o) + "_t" + std::to_string(i) + ".json"),
                           sub.regressors[o][i].to_json());
    subs.push_back({{"rows", sub.rows},
                    {"outputs", sub.outputs},
                    {"classifiers", classifiers},
                    {"first_frequencies", sub.first_frequencies}});
  }
  const nlohmann::json manifest{{"format", bank_format_version},
                                {"plan", plan_to_json(bank.plan)},
                                {"schema", schema_to_json(bank.schema)},
                                {"scaler", scaler_to_json(bank.scaler)},
                                {"regressor_params", bank.params.regressor},
                                {"classifier_params", bank.params.classifier},
                                {"label_frequencies", bank.label_frequencies},
                                {"banks", std::move(subs)}};
  detail::write_json(dir / "manifest.json", manifest);
}

inline VelocityModelBank load_bank(const std::filesystem::path& dir) {
  if (!std::filesystem::is_regular_file(dir / "manifest.json"))
    throw FormatError("no bank manifest in '" + dir.string() + "'");
  const auto manifest = detail::read_json(dir / "manifest.json");
  try {
    if (!manifest.is_object() || manifest.value("format", std::string()) != bank_format_version)
      throw FormatError("unsupported bank format (expected " + std::string(bank_format_version) + ")");
    VelocityModelBank bank;
    bank.plan = plan_from_json(manifest.at("plan"));
    bank.schema = schema_from_json(manifest.at("schema"));
    bank.scaler = scaler_from_json(manifest.at("scaler"));
    bank.scaler.check_matches(bank.schema);
    bank.params.regressor = manifest.at("regressor_params").get<gbt::GbtParams>();
    bank.params.classifier = manifest.at("classifier_params").get<gbt::GbtParams>();
    bank.label_frequencies = manifest.at("label_frequencies").get<std::vector<double>>();
    bank.plan.validate();
    if (resolve_feature_order(bank.schema, bank.plan) != bank.plan.feature_order)
      throw FormatError("manifest feature order is inconsistent with its schema");
    const auto& subs = manifest.at("banks");
    if (bank.plan.conditioning == Conditioning::PerLabel &&
        (subs.size() != bank.label_frequencies.size() ||
         subs.size() != bank.schema.columns[*bank.schema.target].cardinality()))
      throw FormatError("manifest label partitions do not match the target levels");
    if (bank.plan.conditioning == Conditioning::None && subs.size() != 1)
      throw FormatError("unconditioned bank must have exactly one partition");
    for (std::size_t b = 0; b < subs.size(); ++b) {
      const auto& js = subs[b];
      SubBank sub;
      sub.rows = js.at("rows").get<std::size_t>();
      sub.outputs = js.at("outputs").get<std::vector<std::size_t>>();
      sub.first_frequencies = js.at("first_frequencies").get<std::vector<double>>();
      const auto sdir = detail::sub_bank_dir(dir, bank, b);
      if (sub.rows > 0) {
        sub.classifiers.assign(bank.plan.feature_order.size(), std::nullopt);
        for (auto q : js.at("classifiers").get<std::vector<std::size_t>>()) {
          if (q >= sub.classifiers.size()) throw FormatError("classifier position out of range");
          sub.classifiers[q] = gbt::GbtClassifier::from_json(detail::read_json(sdir / ("c" + std::to_string(q) + ".json")));
        }
        sub.regressors.resize(sub.outputs.size());
        for (std::size_t o = 0; o < sub.outputs.size(); ++o)
          for (std::size_t i = 0; i < bank.plan.grid.levels(); ++i)
            sub.regressors[o].push_back(gbt::GbtRegressor::from_json(
                detail::read_json(sdir / ("f" + std::to_string(o) + "_t" + std::to_string(i) + ".json"))));
      }
      bank.banks.push_back(std::move(sub));
    }
    return bank;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("corrupt bank manifest: ") + e.what());
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("invalid bank manifest: ") + e.what());
  } catch (const SchemaError& e) {
    throw FormatError(std::string("invalid bank manifest: ") + e.what());
  }
}

}  // namespace s3f
