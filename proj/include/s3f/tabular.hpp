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
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "s3f/error.hpp"
#include "s3f/matrix.hpp"
#include "s3f/rng.hpp"

namespace s3f {

enum class ColumnKind { Continuous, Categorical };

/// A named column. Categorical columns carry their level labels; the code of
/// a level is its position in `levels`.
struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
  std::vector<std::string> levels;

  bool categorical() const noexcept { return kind == ColumnKind::Categorical; }
  std::size_t cardinality() const noexcept { return levels.size(); }

  friend bool operator==(const Column&, const Column&) = default;
};

struct TableSchema {
  std::vector<Column> columns;
  std::optional<std::size_t> target;

  std::size_t width() const noexcept { return columns.size(); }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i].name == name) return i;
    return std::nullopt;
  }

  /// Column indices other than the target, in schema order.
  std::vector<std::size_t> feature_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (!target || *target != i) out.push_back(i);
    return out;
  }

  std::optional<ColumnKind> target_kind() const {
    if (!target) return std::nullopt;
    return columns[*target].kind;
  }

  void validate() const {
    std::set<std::string> names;
    for (const auto& c : columns) {
      if (!names.insert(c.name).second) throw SchemaError("duplicate column name '" + c.name + "'");
      if (c.categorical() && c.cardinality() < 1)
        throw SchemaError("categorical column '" + c.name + "' has no levels");
    }
    if (target && *target >= columns.size()) throw SchemaError("target index out of range");
  }

  friend bool operator==(const TableSchema&, const TableSchema&) = default;
};

/// n x K table: continuous cells are reals, categorical cells are integer
/// codes stored as doubles. `scaled` marks continuous columns as min-max
/// scaled to the unit interval.
struct DataTable {
  TableSchema schema;
  Matrix cells;
  bool scaled = false;

  std::size_t rows() const noexcept { return cells.rows(); }
  std::size_t width() const noexcept { return schema.width(); }

  int code(std::size_t r, std::size_t c) const { return static_cast<int>(cells(r, c)); }

  void validate() const {
    schema.validate();
    if (cells.cols() != schema.width() && cells.rows() > 0)
      throw SchemaError("cell matrix width does not match schema");
    for (std::size_t r = 0; r < cells.rows(); ++r) {
      for (std::size_t c = 0; c < cells.cols(); ++c) {
        const double v = cells(r, c);
        if (!std::isfinite(v)) throw IngestError("non-finite cell");
        const auto& col = schema.columns[c];
        if (col.categorical()) {
          if (v != std::floor(v) || v < 0 || v >= static_cast<double>(col.cardinality()))
            throw SchemaError("categorical cell out of range in column '" + col.name + "'");
        }
      }
    }
  }
};

inline DataTable select_rows(const DataTable& t, std::span<const std::size_t> idx) {
  return {t.schema, t.cells.select_rows(idx), t.scaled};
}

inline DataTable concat_rows(const DataTable& a, const DataTable& b) {
  if (!(a.schema == b.schema)) throw SchemaError("cannot concatenate tables with different schemas");
  if (a.scaled != b.scaled) throw StateError("cannot concatenate scaled and unscaled tables");
  DataTable out = a;
  if (out.cells.rows() == 0) out.cells = Matrix(0, a.schema.width());
  out.cells.append_rows(b.cells);
  return out;
}

/// Keeps the listed columns (in the given order); the target is kept only if
/// it is among them.
inline DataTable select_columns(const DataTable& t, std::span<const std::size_t> cols) {
  DataTable out;
  out.scaled = t.scaled;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    out.schema.columns.push_back(t.schema.columns[cols[j]]);
    if (t.schema.target == cols[j]) out.schema.target = j;
  }
  out.cells = Matrix(t.rows(), cols.size());
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t j = 0; j < cols.size(); ++j) out.cells(r, j) = t.cells(r, cols[j]);
  return out;
}

// ---------------------------------------------------------------------------
// CSV ingestion

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// Splits one record; handles double-quoted fields with "" escapes.
inline std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

inline std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string quote_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

struct ColumnOverride {
  std::optional<ColumnKind> kind;
  bool target = false;
};

/// Column name -> forced kind and/or target flag. Parsed from
/// {"col": {"kind": "continuous" | "categorical", "target": bool}}.
using SchemaOverride = std::map<std::string, ColumnOverride>;

inline SchemaOverride parse_schema_override(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("schema override must be a JSON object");
  SchemaOverride out;
  for (const auto& [name, spec] : j.items()) {
    if (!spec.is_object()) throw SchemaError("override for '" + name + "' must be an object");
    ColumnOverride o;
    if (spec.contains("kind")) {
      const auto kind = spec.at("kind").get<std::string>();
      if (kind == "continuous") o.kind = ColumnKind::Continuous;
      else if (kind == "categorical") o.kind = ColumnKind::Categorical;
      else throw SchemaError("unknown column kind '" + kind + "'");
    }
    if (spec.contains("target")) o.target = spec.at("target").get<bool>();
    out.emplace(name, o);
  }
  return out;
}

inline SchemaOverride load_schema_override(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open schema override '" + path + "'");
  try {
    return parse_schema_override(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed schema override: ") + e.what());
  }
}

struct LoadOptions {
  /// Numeric columns with at most this many distinct values are categorical.
  std::size_t categorical_threshold = 20;
  /// Explicit target column; otherwise the override's target flag, otherwise
  /// the last column when `last_column_target` is set.
  std::optional<std::string> target;
  bool last_column_target = true;
  SchemaOverride overrides;
};

inline DataTable parse_csv(std::istream& in, const LoadOptions& opts = {}) {
  std::string line;
  if (!std::getline(in, line)) throw IngestError("empty CSV: header row missing");
  const auto header = detail::split_record(line);
  const std::size_t width = header.size();

  std::vector<std::vector<std::string>> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_record(line);
    if (fields.size() != width)
      throw IngestError("ragged row at line " + std::to_string(line_no) + ": expected " +
                        std::to_string(width) + " fields, got " + std::to_string(fields.size()));
    for (std::size_t c = 0; c < width; ++c) {
      if (detail::trim(fields[c]).empty())
        throw IngestError("missing cell at line " + std::to_string(line_no) + ", column '" +
                          header[c] + "'");
    }
    records.push_back(std::move(fields));
  }

  DataTable table;
  for (const auto& h : header) table.schema.columns.push_back({std::string(detail::trim(h)), ColumnKind::Continuous, {}});
  for (const auto& [name, o] : opts.overrides)
    if (!table.schema.index_of(name)) throw SchemaError("override names unknown column '" + name + "'");

  table.cells = Matrix(records.size(), width);
  for (std::size_t c = 0; c < width; ++c) {
    auto& col = table.schema.columns[c];
    std::optional<ColumnKind> forced;
    if (auto it = opts.overrides.find(col.name); it != opts.overrides.end()) forced = it->second.kind;

    std::vector<double> numeric(records.size());
    bool all_numeric = true;
    std::set<double> distinct;
    for (std::size_t r = 0; r < records.size(); ++r) {
      auto v = detail::parse_real(records[r][c]);
      if (!v) {
        all_numeric = false;
        break;
      }
      numeric[r] = *v;
      if (distinct.size() <= opts.categorical_threshold) distinct.insert(*v);
    }
    ColumnKind kind = (!all_numeric || distinct.size() <= opts.categorical_threshold)
                          ? ColumnKind::Categorical
                          : ColumnKind::Continuous;
    if (forced) {
      if (*forced == ColumnKind::Continuous && !all_numeric)
        throw IngestError("column '" + col.name + "' forced continuous but has non-numeric cells");
      kind = *forced;
    }
    col.kind = kind;
    if (kind == ColumnKind::Continuous) {
      for (std::size_t r = 0; r < records.size(); ++r) table.cells(r, c) = numeric[r];
    } else {
      std::unordered_map<std::string, std::size_t> codes;
      for (std::size_t r = 0; r < records.size(); ++r) {
        const std::string label(detail::trim(records[r][c]));
        auto [it, inserted] = codes.emplace(label, col.levels.size());
        if (inserted) col.levels.push_back(label);
        table.cells(r, c) = static_cast<double>(it->second);
      }
    }
  }

  if (opts.target) {
    table.schema.target = table.schema.index_of(*opts.target);
    if (!table.schema.target) throw SchemaError("target column '" + *opts.target + "' not found");
  } else {
    for (const auto& [name, o] : opts.overrides)
      if (o.target) table.schema.target = table.schema.index_of(name);
    if (!table.schema.target && opts.last_column_target && width > 0) table.schema.target = width - 1;
  }
  table.schema.validate();
  return table;
}

inline DataTable load_csv(const std::string& path, const LoadOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open '" + path + "'");
  return parse_csv(in, opts);
}

/// Writes the header and rows; categorical cells as their level labels.
inline void write_csv(const DataTable& t, std::ostream& out) {
  for (std::size_t c = 0; c < t.width(); ++c) {
    if (c) out << ',';
    out << detail::quote_field(t.schema.columns[c].name);
  }
  out << '\n';
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.width(); ++c) {
      if (c) out << ',';
      const auto& col = t.schema.columns[c];
      if (col.categorical()) out << detail::quote_field(col.levels.at(static_cast<std::size_t>(t.cells(r, c))));
      else out << detail::format_real(t.cells(r, c));
    }
    out << '\n';
  }
}

inline void save_csv(const DataTable& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IngestError("cannot write '" + path + "'");
  write_csv(t, out);
}

/// Reads a CSV whose columns must match `schema` by name and order;
/// categorical labels are mapped through the schema's levels.
inline DataTable load_csv_with_schema(const std::string& path, const TableSchema& schema) {
  LoadOptions opts;
  opts.last_column_target = false;
  opts.categorical_threshold = 0;
  for (const auto& c : schema.columns) opts.overrides[c.name].kind = ColumnKind::Categorical;
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open '" + path + "'");
  DataTable raw = parse_csv(in, opts);
  if (raw.width() != schema.width()) throw SchemaError("column count does not match schema");
  DataTable out{schema, Matrix(raw.rows(), schema.width()), false};
  for (std::size_t c = 0; c < schema.width(); ++c) {
    const auto& col = schema.columns[c];
    const auto& rcol = raw.schema.columns[c];
    if (rcol.name != col.name) throw SchemaError("column '" + rcol.name + "' does not match schema");
    for (std::size_t r = 0; r < raw.rows(); ++r) {
      const auto& label = rcol.levels[static_cast<std::size_t>(raw.cells(r, c))];
      if (col.categorical()) {
        auto it = std::find(col.levels.begin(), col.levels.end(), label);
        if (it == col.levels.end()) throw SchemaError("unknown level '" + label + "' in column '" + col.name + "'");
        out.cells(r, c) = static_cast<double>(it - col.levels.begin());
      } else {
        auto v = detail::parse_real(label);
        if (!v) throw IngestError("non-numeric cell in continuous column '" + col.name + "'");
        out.cells(r, c) = *v;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Min-max scaling

struct ColumnRange {
  double min = 0.0;
  double max = 0.0;
  friend bool operator==(const ColumnRange&, const ColumnRange&) = default;
};

/// Per-column training ranges; entries are empty for categorical columns.
struct ScalerState {
  std::vector<std::string> names;
  std::vector<std::optional<ColumnRange>> ranges;
  bool scaled = true;

  void check_matches(const TableSchema& schema) const {
    if (schema.width() != names.size()) throw SchemaError("scaler fitted on a different column count");
    for (std::size_t c = 0; c < names.size(); ++c) {
      if (schema.columns[c].name != names[c] ||
          schema.columns[c].categorical() == ranges[c].has_value())
        throw SchemaError("scaler does not match column '" + schema.columns[c].name + "'");
    }
  }

  double forward(std::size_t c, double x) const {
    const auto& r = *ranges[c];
    if (r.max == r.min) return 0.0;
    return (x - r.min) / (r.max - r.min);
  }
  double inverse(std::size_t c, double x) const {
    const auto& r = *ranges[c];
    return r.min + x * (r.max - r.min);
  }

  friend bool operator==(const ScalerState&, const ScalerState&) = default;
};

inline ScalerState minmax_fit(const DataTable& table) {
  ScalerState st;
  for (std::size_t c = 0; c < table.width(); ++c) {
    const auto& col = table.schema.columns[c];
    st.names.push_back(col.name);
    if (col.categorical()) {
      st.ranges.emplace_back();
      continue;
    }
    ColumnRange r{0.0, 0.0};
    if (table.rows() > 0) {
      r.min = r.max = table.cells(0, c);
      for (std::size_t i = 1; i < table.rows(); ++i) {
        r.min = std::min(r.min, table.cells(i, c));
        r.max = std::max(r.max, table.cells(i, c));
      }
    }
    st.ranges.push_back(r);
  }
  return st;
}

/// Applies an already fitted scaler (no clipping).
inline DataTable minmax_transform(const DataTable& table, const ScalerState& state) {
  if (table.scaled) throw StateError("table is already scaled");
  state.check_matches(table.schema);
  DataTable out = table;
  for (std::size_t c = 0; c < table.width(); ++c) {
    if (!state.ranges[c]) continue;
    for (std::size_t r = 0; r < table.rows(); ++r) out.cells(r, c) = state.forward(c, table.cells(r, c));
  }
  out.scaled = true;
  return out;
}

inline std::pair<DataTable, ScalerState> minmax_fit_transform(const DataTable& table) {
  if (table.scaled) throw StateError("table is already scaled");
  ScalerState st = minmax_fit(table);
  return {minmax_transform(table, st), st};
}

/// Maps continuous cells back to original units and clips them into the
/// training range.
inline DataTable minmax_inverse_clip(const DataTable& table, const ScalerState& state) {
  state.check_matches(table.schema);
  DataTable out = table;
  for (std::size_t c = 0; c < table.width(); ++c) {
    if (!state.ranges[c]) continue;
    const auto& r = *state.ranges[c];
    for (std::size_t i = 0; i < table.rows(); ++i)
      out.cells(i, c) = std::clamp(state.inverse(c, table.cells(i, c)), r.min, r.max);
  }
  out.scaled = false;
  return out;
}

// ---------------------------------------------------------------------------
// One-hot encoding

struct OneHotMap {
  struct Block {
    std::size_t offset = 0;
    std::size_t width = 1;  // 1 for continuous, cardinality for categorical
    bool categorical = false;
  };
  TableSchema schema;
  std::vector<Block> blocks;  // one per schema column
  std::size_t width = 0;
};

inline OneHotMap make_one_hot_map(const TableSchema& schema) {
  OneHotMap map;
  map.schema = schema;
  for (const auto& col : schema.columns) {
    OneHotMap::Block b{map.width, col.categorical() ? col.cardinality() : 1, col.categorical()};
    map.width += b.width;
    map.blocks.push_back(b);
  }
  return map;
}

inline Matrix one_hot_encode(const DataTable& table, const OneHotMap& map) {
  if (!(table.schema == map.schema)) throw SchemaError("table schema does not match one-hot map");
  Matrix out(table.rows(), map.width);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.width(); ++c) {
      const auto& b = map.blocks[c];
      if (b.categorical) out(r, b.offset + static_cast<std::size_t>(table.cells(r, c))) = 1.0;
      else out(r, b.offset) = table.cells(r, c);
    }
  }
  return out;
}

inline std::pair<Matrix, OneHotMap> one_hot_encode(const DataTable& table) {
  OneHotMap map = make_one_hot_map(table.schema);
  return {one_hot_encode(table, map), std::move(map)};
}

/// Index of the largest entry; ties go to the lowest index.
inline std::size_t argmax_lowest(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] > v[best]) best = k;
  return best;
}

inline DataTable one_hot_decode(const Matrix& m, const OneHotMap& map, bool scaled = false) {
  if (m.cols() != map.width) throw SchemaError("matrix width does not match one-hot map");
  DataTable out{map.schema, Matrix(m.rows(), map.schema.width()), scaled};
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < map.blocks.size(); ++c) {
      const auto& b = map.blocks[c];
      if (b.categorical) out.cells(r, c) = static_cast<double>(argmax_lowest(row.subspan(b.offset, b.width)));
      else out.cells(r, c) = row[b.offset];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Train/test split

/// Seeded partition into (train, test); both keep the original row order.
/// Stratification applies when requested and the target is categorical.
inline std::pair<DataTable, DataTable> split(const DataTable& table, double test_fraction,
                                             std::uint64_t seed, bool stratify) {
  const std::size_t n = table.rows();
  if (n < 2) throw ArgumentError("split needs at least 2 rows");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ArgumentError("test_fraction must lie in (0, 1)");
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  if (n_test == 0 || n_test >= n) throw ArgumentError("test_fraction leaves one side of the split empty");

  Rng rng(seed);
  std::vector<char> in_test(n, 0);
  const bool strat = stratify && table.schema.target &&
                     table.schema.columns[*table.schema.target].categorical();
  if (!strat) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx.begin(), idx.end());
    for (std::size_t i = 0; i < n_test; ++i) in_test[idx[i]] = 1;
  } else {
    const std::size_t t = *table.schema.target;
    const std::size_t k = table.schema.columns[t].cardinality();
    std::vector<std::vector<std::size_t>> by_class(k);
    for (std::size_t r = 0; r < n; ++r) by_class[static_cast<std::size_t>(table.cells(r, t))].push_back(r);
    // Largest-remainder apportionment of n_test across classes.
    std::vector<std::size_t> quota(k);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < k; ++c) {
      const double exact = static_cast<double>(by_class[c].size()) * static_cast<double>(n_test) / static_cast<double>(n);
      quota[c] = static_cast<std::size_t>(std::floor(exact));
      assigned += quota[c];
      remainders.emplace_back(exact - static_cast<double>(quota[c]), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < n_test && i < remainders.size(); ++i, ++assigned) ++quota[remainders[i].second];
    for (std::size_t c = 0; c < k; ++c) {
      auto& members = by_class[c];
      rng.shuffle(members.begin(), members.end());
      for (std::size_t i = 0; i < quota[c]; ++i) in_test[members[i]] = 1;
    }
  }
  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t r = 0; r < n; ++r) (in_test[r] ? test_idx : train_idx).push_back(r);
  return {select_rows(table, train_idx), select_rows(table, test_idx)};
}

// ---------------------------------------------------------------------------
// JSON forms of the schema and scaler

inline nlohmann::json schema_to_json(const TableSchema& s) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : s.columns) {
    nlohmann::json j{{"name", c.name}, {"kind", c.categorical() ? "categorical" : "continuous"}};
    if (c.categorical()) j["levels"] = c.levels;
    cols.push_back(std::move(j));
  }
  return {{"columns", std::move(cols)}, {"target", s.target ? nlohmann::json(*s.target) : nlohmann::json(nullptr)}};
}

inline TableSchema schema_from_json(const nlohmann::json& j) {
  try {
    TableSchema s;
    for (const auto& c : j.at("columns")) {
      Column col;
      col.name = c.at("name").get<std::string>();
      const auto kind = c.at("kind").get<std::string>();
      if (kind == "categorical") {
        col.kind = ColumnKind::Categorical;
        col.levels = c.at("levels").get<std::vector<std::string>>();
      } else if (kind != "continuous") {
        throw FormatError("unknown column kind '" + kind + "'");
      }
      s.columns.push_back(std::move(col));
    }
    if (!j.at("target").is_null()) s.target = j.at("target").get<std::size_t>();
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("corrupt schema: ") + e.what());
  } catch (const SchemaError& e) {
    throw FormatError(std::string("invalid schema: ") + e.what());
  }
}

inline nlohmann::json scaler_to_json(const ScalerState& st) {
  nlohmann::json ranges = nlohmann::json::array();
  for (const auto& r : st.ranges)
    ranges.push_back(r ? nlohmann::json::array({r->min, r->max}) : nlohmann::json(nullptr));
  return {{"names", st.names}, {"ranges", std::move(ranges)}};
}

inline ScalerState scaler_from_json(const nlohmann::json& j) {
  try {
    ScalerState st;
    st.names = j.at("names").get<std::vector<std::string>>();
    for (const auto& r : j.at("ranges")) {
      if (r.is_null()) st.ranges.emplace_back();
      else st.ranges.push_back(ColumnRange{r.at(0).get<double>(), r.at(1).get<double>()});
    }
    if (st.ranges.size() != st.names.size()) throw FormatError("scaler names and ranges differ in length");
    return st;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("corrupt scaler: ") + e.what());
  }
}

}  // namespace s3f
