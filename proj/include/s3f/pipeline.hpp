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
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "s3f/error.hpp"
#include "s3f/flow.hpp"
#include "s3f/generate.hpp"
#include "s3f/metrics.hpp"
#include "s3f/tabular.hpp"

namespace s3f {

/// One (method, solver) cell of a benchmark.
struct MethodSpec {
  Method method = Method::HS3F;
  SolverKind solver = SolverKind::Euler;

  std::string label() const { return std::string(method_name(method)) + "-" + std::string(solver_name(solver)); }
  friend bool operator==(const MethodSpec&, const MethodSpec&) = default;
};

inline MethodSpec parse_method_spec(const std::string& s) {
  const auto dash = s.find('-');
  if (dash == std::string::npos) throw ArgumentError("method spec '" + s + "' must look like HS3F-euler");
  return {parse_method(s.substr(0, dash)), parse_solver(s.substr(dash + 1))};
}

/// Everything a run needs. Precedence: command-line flags, then the config
/// file, then these defaults.
struct RunConfig {
  std::string data;
  std::string schema;   // optional override file
  std::string dataset;  // report label; defaults to the data file stem
  std::string target;   // optional target column name
  std::size_t categorical_threshold = 20;

  double test_fraction = 0.2;
  std::optional<std::uint64_t> split_seed;
  bool stratify = true;

  Method method = Method::HS3F;
  SolverKind solver = SolverKind::Euler;
  int duplication = 100;
  int n_s = 50;
  std::vector<std::string> feature_order;  // column names; empty = default order
  std::string conditioning = "auto";       // auto | none | per_label
  FlowGbtParams gbt;

  std::uint64_t seed = 0;
  std::optional<std::size_t> n_samples;  // unset = training row count
  std::optional<std::uint64_t> generation_seed;
  double init_mu = 0.0;
  double init_sigma = 1.0;

  std::size_t coverage_k = 5;
  std::size_t ot_max_points = 1000;
  bool timing = true;

  std::vector<MethodSpec> bench = {{Method::FF, SolverKind::Euler},
                                   {Method::CS3F, SolverKind::Euler},
                                   {Method::CS3F, SolverKind::RK4},
                                   {Method::HS3F, SolverKind::Euler},
                                   {Method::HS3F, SolverKind::RK4}};
  std::vector<MethodSpec> sensitivity = {{Method::FF, SolverKind::Euler},
                                         {Method::CS3F, SolverKind::RK4},
                                         {Method::HS3F, SolverKind::RK4}};
  std::vector<NoisePerturbation> perturbations = default_perturbations();

  std::string out = "s3f_out";

  std::uint64_t resolved_split_seed() const { return split_seed.value_or(seed); }
  std::uint64_t resolved_generation_seed() const { return generation_seed.value_or(seed); }

  void validate() const {
    if (data.empty()) throw ArgumentError("no data path given (--data or \"data\")");
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ArgumentError("test_fraction must lie in (0, 1)");
    if (duplication < 1) throw ArgumentError("duplication must be at least 1");
    if (n_s < 1) throw ArgumentError("n_s must be at least 1");
    if (n_samples && *n_samples == 0) throw ArgumentError("n_samples must be at least 1");
    if (!(init_sigma > 0.0)) throw ArgumentError("init_sigma must be positive");
    if (coverage_k < 1) throw ArgumentError("coverage k must be at least 1");
    if (ot_max_points < 1) throw ArgumentError("ot_max_points must be at least 1");
    if (conditioning != "auto" && conditioning != "none" && conditioning != "per_label")
      throw ArgumentError("conditioning must be auto, none or per_label");
    gbt.regressor.validate();
    gbt.classifier.validate();
  }
};

inline nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json bench = nlohmann::json::array(), sens = nlohmann::json::array(), pert = nlohmann::json::array();
  for (const auto& m : c.bench) bench.push_back(m.label());
  for (const auto& m : c.sensitivity) sens.push_back(m.label());
  for (const auto& p : c.perturbations) pert.push_back({p.mu, p.sigma});
  return {{"data", c.data},
          {"schema", c.schema},
          {"dataset", c.dataset},
          {"target", c.target},
          {"categorical_threshold", c.categorical_threshold},
          {"split", {{"test_fraction", c.test_fraction}, {"seed", c.resolved_split_seed()}, {"stratify", c.stratify}}},
          {"method", method_name(c.method)},
          {"solver", solver_name(c.solver)},
          {"duplication", c.duplication},
          {"n_s", c.n_s},
          {"feature_order", c.feature_order},
          {"conditioning", c.conditioning},
          {"regressor", c.gbt.regressor},
          {"classifier", c.gbt.classifier},
          {"seed", c.seed},
          {"generation",
           {{"n_samples", c.n_samples ? nlohmann::json(*c.n_samples) : nlohmann::json("train_rows")},
            {"seed", c.resolved_generation_seed()},
            {"init_mu", c.init_mu},
            {"init_sigma", c.init_sigma}}},
          {"metrics", {{"k", c.coverage_k}, {"ot_max_points", c.ot_max_points}}},
          {"timing", c.timing},
          {"bench", bench},
          {"sensitivity", sens},
          {"perturbations", pert},
          {"out", c.out}};
}

namespace detail {

inline void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ArgumentError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ArgumentError("unknown config key '" + key + "' in " + where);
  }
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

}  // namespace detail

/// Overlays the keys present in `j` onto `c`.
inline void apply_config_json(RunConfig& c, const nlohmann::json& j) {
  try {
    detail::check_keys(j,
                       {"data", "schema", "dataset", "target", "categorical_threshold", "split", "method", "solver",
                        "duplication", "n_s", "feature_order", "conditioning", "regressor", "classifier", "seed",
                        "generation", "metrics", "timing", "bench", "sensitivity", "perturbations", "out"},
                       "config");
    detail::read(j, "data", c.data);
    detail::read(j, "schema", c.schema);
    detail::read(j, "dataset", c.dataset);
    detail::read(j, "target", c.target);
    detail::read(j, "categorical_threshold", c.categorical_threshold);
    if (j.contains("split")) {
      const auto& s = j.at("split");
      detail::check_keys(s, {"test_fraction", "seed", "stratify"}, "split");
      detail::read(s, "test_fraction", c.test_fraction);
      if (s.contains("seed")) c.split_seed = s.at("seed").get<std::uint64_t>();
      detail::read(s, "stratify", c.stratify);
    }
    if (j.contains("method")) c.method = parse_method(j.at("method").get<std::string>());
    if (j.contains("solver")) c.solver = parse_solver(j.at("solver").get<std::string>());
    detail::read(j, "duplication", c.duplication);
    detail::read(j, "n_s", c.n_s);
    detail::read(j, "feature_order", c.feature_order);
    detail::read(j, "conditioning", c.conditioning);
    for (auto [key, params] : {std::pair{"regressor", &c.gbt.regressor}, std::pair{"classifier", &c.gbt.classifier}}) {
      if (!j.contains(key)) continue;
      detail::check_keys(j.at(key), {"trees", "learning_rate", "max_depth", "min_samples_leaf", "seed", "reg_lambda"},
                         key);
      gbt::from_json(j.at(key), *params);
    }
    detail::read(j, "seed", c.seed);
    if (j.contains("generation")) {
      const auto& g = j.at("generation");
      detail::check_keys(g, {"n_samples", "seed", "init_mu", "init_sigma"}, "generation");
      if (g.contains("n_samples")) c.n_samples = g.at("n_samples").get<std::size_t>();
      if (g.contains("seed")) c.generation_seed = g.at("seed").get<std::uint64_t>();
      detail::read(g, "init_mu", c.init_mu);
      detail::read(g, "init_sigma", c.init_sigma);
    }
    if (j.contains("metrics")) {
      const auto& m = j.at("metrics");
      detail::check_keys(m, {"k", "ot_max_points"}, "metrics");
      detail::read(m, "k", c.coverage_k);
      detail::read(m, "ot_max_points", c.ot_max_points);
    }
    detail::read(j, "timing", c.timing);
    if (j.contains("bench")) {
      c.bench.clear();
      for (const auto& s : j.at("bench")) c.bench.push_back(parse_method_spec(s.get<std::string>()));
    }
    if (j.contains("sensitivity")) {
      c.sensitivity.clear();
      for (const auto& s : j.at("sensitivity")) c.sensitivity.push_back(parse_method_spec(s.get<std::string>()));
    }
    if (j.contains("perturbations")) {
      c.perturbations.clear();
      for (const auto& p : j.at("perturbations")) c.perturbations.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    detail::read(j, "out", c.out);
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("bad config value: ") + e.what());
  }
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config '" + path + "'");
  RunConfig c;
  try {
    apply_config_json(c, nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ArgumentError(std::string("config is not valid JSON: ") + e.what());
  }
  return c;
}

// ---------------------------------------------------------------------------
// Shared steps

struct PreparedData {
  DataTable data;
  DataTable train;
  DataTable test;
};

/// Loads the table, resolves the dataset label and conditioning, and splits.
inline PreparedData prepare_data(RunConfig& c) {
  c.validate();
  LoadOptions opts;
  opts.categorical_threshold = c.categorical_threshold;
  if (!c.target.empty()) opts.target = c.target;
  if (!c.schema.empty()) opts.overrides = load_schema_override(c.schema);
  PreparedData p;
  p.data = load_csv(c.data, opts);
  if (c.dataset.empty()) c.dataset = std::filesystem::path(c.data).stem().string();
  if (c.conditioning == "auto") {
    const auto& s = p.data.schema;
    c.conditioning = s.target && s.columns[*s.target].categorical() ? "per_label" : "none";
  }
  std::tie(p.train, p.test) = split(p.data, c.test_fraction, c.resolved_split_seed(), c.stratify);
  c.n_samples = c.n_samples.value_or(p.train.rows());
  return p;
}

inline FlowTrainingPlan make_plan(const RunConfig& c, const TableSchema& schema, Method method) {
  FlowTrainingPlan p;
  p.method = method;
  p.duplication = c.duplication;
  p.grid.n_s = c.n_s;
  p.conditioning = parse_conditioning(c.conditioning);
  p.seed = c.seed;
  for (const auto& name : c.feature_order) {
    const auto idx = schema.index_of(name);
    if (!idx) throw ArgumentError("feature_order names unknown column '" + name + "'");
    p.feature_order.push_back(*idx);
  }
  return p;
}

inline GenerationRequest make_request(const RunConfig& c, Method method, SolverKind solver, std::size_t train_rows) {
  GenerationRequest r;
  r.method = method;
  r.solver = solver;
  r.n_samples = c.n_samples.value_or(train_rows);
  r.seed = c.resolved_generation_seed();
  r.init_mu = c.init_mu;
  r.init_sigma = c.init_sigma;
  return r;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write '" + path.string() + "'");
  out << text;
}

inline void write_run_json(const RunConfig& c, const std::string& command) {
  nlohmann::json j = config_to_json(c);
  j["command"] = command;
  write_text(std::filesystem::path(c.out) / "run.json", j.dump(2) + "\n");
}

// FNV-1a over the manifest bytes: a stable identifier for a saved bank.
inline std::string bank_id(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json", std::ios::binary);
  std::uint64_t h = 1469598103934665603ull;
  char ch;
  while (in.get(ch)) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ull;
  }
  std::ostringstream ss;
  ss << std::hex << h;
  return ss.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands

struct FitResult {
  VelocityModelBank bank;
  double seconds = 0.0;
  std::filesystem::path bank_dir;
};

/// ingest -> split -> scale on train -> train -> save to <out>/bank.
inline FitResult cmd_fit(RunConfig c, std::ostream& log) {
  const auto data = prepare_data(c);
  detail::write_run_json(c, "fit");
  const auto t0 = std::chrono::steady_clock::now();
  FitResult r;
  r.bank = fit_bank(data.train, make_plan(c, data.train.schema, c.method), c.gbt);
  r.seconds = seconds_since(t0);
  r.bank_dir = std::filesystem::path(c.out) / "bank";
  std::filesystem::remove_all(r.bank_dir);
  save_bank(r.bank, r.bank_dir);
  log << nlohmann::json{{"command", "fit"},
                        {"method", method_name(c.method)},
                        {"partitions", r.bank.banks.size()},
                        {"regressors", r.bank.regressor_count()},
                        {"classifiers", r.bank.classifier_count()},
                        {"seconds", c.timing ? r.seconds : 0.0},
                        {"bank", r.bank_dir.string()}}
             .dump()
      << "\n";
  return r;
}

/// Loads a bank, generates, writes <out>/fake.csv and <out>/fake.json.
inline GeneratedTable cmd_generate(RunConfig c, const std::filesystem::path& bank_dir, std::optional<Method> method,
                                   std::ostream& log) {
  if (c.n_samples && *c.n_samples == 0) throw ArgumentError("n_samples must be at least 1");
  const VelocityModelBank bank = load_bank(bank_dir);
  std::size_t rows = 0;
  for (const auto& b : bank.banks) rows += b.rows;
  c.n_samples = c.n_samples.value_or(rows);
  const auto req = make_request(c, method.value_or(bank.plan.method), c.solver, rows);
  detail::write_run_json(c, "generate");
  GeneratedTable g = generate(bank, req);
  const auto out = std::filesystem::path(c.out);
  std::ostringstream csv;
  write_csv(g.table, csv);
  detail::write_text(out / "fake.csv", csv.str());
  const nlohmann::json prov{{"bank", bank_dir.string()},
                            {"bank_id", detail::bank_id(bank_dir)},
                            {"request", request_to_json(req)},
                            {"seconds", c.timing ? g.seconds : 0.0}};
  detail::write_text(out / "fake.json", prov.dump(2) + "\n");
  log << nlohmann::json{{"command", "generate"}, {"rows", g.table.rows()}, {"csv", (out / "fake.csv").string()},
                        {"seconds", c.timing ? g.seconds : 0.0}}
             .dump()
      << "\n";
  return g;
}

/// Scores a generated CSV against the configured real split.
inline MetricsReport cmd_evaluate(RunConfig c, const std::filesystem::path& fake_csv, std::ostream& log) {
  const auto data = prepare_data(c);
  detail::write_run_json(c, "evaluate");
  const DataTable fake = load_csv_with_schema(fake_csv.string(), data.data.schema);
  double seconds = 0.0;
  MetricsReport r;
  r.method = std::string(method_name(c.method));
  r.solver = std::string(solver_name(c.solver));
  auto prov_path = fake_csv;
  prov_path.replace_extension(".json");
  if (std::filesystem::exists(prov_path)) {
    std::ifstream in(prov_path);
    try {
      const auto prov = nlohmann::json::parse(in);
      seconds = prov.at("seconds").get<double>();
      r.method = prov.at("request").at("method").get<std::string>();
      r.solver = prov.at("request").at("solver").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("corrupt provenance file: ") + e.what());
    }
  }
  const MetricsOptions opts{c.coverage_k, c.ot_max_points, c.seed};
  const MetricsReport full = full_report(data.train, data.test, fake, c.timing ? seconds : 0.0, opts);
  const std::string method = r.method, solver = r.solver;
  r = full;
  r.dataset = c.dataset;
  r.method = method;
  r.solver = solver;
  const auto out = std::filesystem::path(c.out);
  detail::write_text(out / "report.json", r.to_json().dump(2) + "\n");
  detail::write_text(out / "report.csv", std::string(MetricsReport::csv_header) + "\n" + r.csv_row() + "\n");
  log << r.to_json().dump() << "\n";
  return r;
}

struct BenchRow {
  MetricsReport report;
  std::string error;  // empty when the cell succeeded
};

/// Fits, generates and scores every configured (method, solver) on one
/// split. Failed cells are recorded and the rest proceed. The last row is the
/// mean over successful cells.
inline std::vector<BenchRow> cmd_bench(RunConfig c, std::ostream& log) {
  const auto data = prepare_data(c);
  detail::write_run_json(c, "bench");
  const MetricsOptions opts{c.coverage_k, c.ot_max_points, c.seed};
  std::vector<BenchRow> rows;
  for (const auto& spec : c.bench) {
    BenchRow row;
    row.report.dataset = c.dataset;
    row.report.method = std::string(method_name(spec.method));
    row.report.solver = std::string(solver_name(spec.solver));
    try {
      const auto t0 = std::chrono::steady_clock::now();
      const auto bank = fit_bank(data.train, make_plan(c, data.train.schema, spec.method), c.gbt);
      const double fit_seconds = seconds_since(t0);
      const auto g = generate(bank, make_request(c, spec.method, spec.solver, data.train.rows()));
      const double secs = c.timing ? fit_seconds + g.seconds : 0.0;
      const MetricsReport rep = full_report(data.train, data.test, g.table, secs, opts);
      const auto keep = row.report;
      row.report = rep;
      row.report.dataset = keep.dataset;
      row.report.method = keep.method;
      row.report.solver = keep.solver;
    } catch (const Error& e) {
      row.error = std::string(error_name(e.kind())) + ": " + e.what();
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.report.w_train = row.report.w_test = row.report.coverage_train = row.report.coverage_test = nan;
      row.report.score_fake = row.report.score_comb = row.report.seconds = nan;
    }
    log << nlohmann::json{{"command", "bench"}, {"cell", spec.label()}, {"ok", row.error.empty()}}.dump() << "\n";
    rows.push_back(std::move(row));
  }

  BenchRow mean;
  mean.report.dataset = c.dataset;
  mean.report.method = "mean";
  mean.report.solver = "all";
  std::size_t ok = 0;
  for (const auto& r : rows) {
    if (!r.error.empty()) continue;
    ++ok;
    mean.report.score_kind = r.report.score_kind;
    mean.report.w_train += r.report.w_train;
    mean.report.w_test += r.report.w_test;
    mean.report.coverage_train += r.report.coverage_train;
    mean.report.coverage_test += r.report.coverage_test;
    mean.report.score_fake += r.report.score_fake;
    mean.report.score_comb += r.report.score_comb;
    mean.report.seconds += r.report.seconds;
  }
  if (ok == 0) {
    mean.error = "no successful cells";
  } else {
    const double k = static_cast<double>(ok);
    for (double* v : {&mean.report.w_train, &mean.report.w_test, &mean.report.coverage_train,
                      &mean.report.coverage_test, &mean.report.score_fake, &mean.report.score_comb,
                      &mean.report.seconds})
      *v /= k;
  }
  rows.push_back(mean);

  std::string csv = std::string(MetricsReport::csv_header) + "\n";
  nlohmann::json js = nlohmann::json::array();
  for (const auto& r : rows) {
    csv += r.report.csv_row() + "\n";
    auto j = r.report.to_json();
    if (!r.error.empty()) j["error"] = r.error;
    js.push_back(std::move(j));
  }
  const auto out = std::filesystem::path(c.out);
  detail::write_text(out / "bench.csv", csv);
  detail::write_text(out / "bench.json", js.dump(2) + "\n");
  return rows;
}

struct SensitivityCell {
  std::string method;
  std::string solver;
  NoisePerturbation noise;
  double w_train_default = 0.0, w_test_default = 0.0;
  double w_train = 0.0, w_test = 0.0;
  double delta_train = 0.0, delta_test = 0.0;
  std::string error;
};

inline constexpr const char* sensitivity_csv_header =
    "dataset,method,solver,mu,sigma,W_tr_default,W_te_default,W_tr,W_te,dW_tr,dW_te";

/// Initial-noise sensitivity for every configured method: one row per
/// (method, perturbation).
inline std::vector<SensitivityCell> cmd_sensitivity(RunConfig c, std::ostream& log) {
  const auto data = prepare_data(c);
  detail::write_run_json(c, "sensitivity");
  if (c.perturbations.empty()) throw ArgumentError("sensitivity needs at least one perturbation");
  const MetricsOptions opts{c.coverage_k, c.ot_max_points, c.seed};
  std::vector<SensitivityCell> cells;
  for (const auto& spec : c.sensitivity) {
    const std::string method(method_name(spec.method)), solver(solver_name(spec.solver));
    try {
      const auto bank = fit_bank(data.train, make_plan(c, data.train.schema, spec.method), c.gbt);
      auto req = make_request(c, spec.method, spec.solver, data.train.rows());
      const auto rep = run_sensitivity(bank, req, c.perturbations, data.train, data.test, opts);
      for (const auto& r : rep.rows)
        cells.push_back({method, solver, r.noise, rep.w_train_default, rep.w_test_default, r.w_train, r.w_test,
                         r.delta_train, r.delta_test, ""});
    } catch (const Error& e) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      for (const auto& p : c.perturbations)
        cells.push_back({method, solver, p, nan, nan, nan, nan, nan, nan,
                         std::string(error_name(e.kind())) + ": " + e.what()});
    }
    log << nlohmann::json{{"command", "sensitivity"}, {"cell", spec.label()}, {"ok", cells.back().error.empty()}}.dump()
        << "\n";
  }
  std::string csv = std::string(sensitivity_csv_header) + "\n";
  nlohmann::json js = nlohmann::json::array();
  for (const auto& s : cells) {
    using detail::format_real;
    csv += detail::quote_field(c.dataset) + "," + s.method + "," + s.solver + "," + format_real(s.noise.mu) + "," +
           format_real(s.noise.sigma) + "," + format_real(s.w_train_default) + "," + format_real(s.w_test_default) +
           "," + format_real(s.w_train) + "," + format_real(s.w_test) + "," + format_real(s.delta_train) + "," +
           format_real(s.delta_test) + "\n";
    nlohmann::json j{{"dataset", c.dataset}, {"method", s.method},   {"solver", s.solver},
                     {"mu", s.noise.mu},     {"sigma", s.noise.sigma}, {"W_tr_default", s.w_train_default},
                     {"W_te_default", s.w_test_default}, {"W_tr", s.w_train}, {"W_te", s.w_test},
                     {"dW_tr", s.delta_train}, {"dW_te", s.delta_test}};
    if (!s.error.empty()) j["error"] = s.error;
    js.push_back(std::move(j));
  }
  const auto out = std::filesystem::path(c.out);
  detail::write_text(out / "sensitivity.csv", csv);
  detail::write_text(out / "sensitivity.json", js.dump(2) + "\n");
  return cells;
}

/// Process exit code for an error kind: 2 argument, 3 data, 4 numeric.
inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Argument:
    case ErrorKind::Mode: return 2;
    case ErrorKind::Numeric: return 4;
    default: return 3;
  }
}

}  // namespace s3f
