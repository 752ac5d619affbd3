//
// Copyright 2026 The Synthbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "synthbench/tabular.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"

#include "text_util.h"

namespace synthbench {
namespace {

bool IsIntegral(double v) { return std::isfinite(v) && std::floor(v) == v; }

std::string FormatDouble(double v) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, end);
}

absl::StatusOr<double> ParseDouble(std::string_view cell) {
  cell = internal::StripWhitespace(cell);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(),
                                   value);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("non-numeric cell '", std::string(cell), "'"));
  }
  return value;
}

std::string_view KindName(ColumnType type) {
  switch (type) {
    case ColumnType::kContinuous:
      return "continuous";
    case ColumnType::kCategorical:
      return "categorical";
    case ColumnType::kCount:
      return "count";
  }
  return "unknown";
}

}  // namespace

absl::StatusOr<Schema> Schema::Create(std::vector<Column> columns,
                                      std::vector<StructuralZeroRule> rules,
                                      int outcome_column) {
  std::set<std::string> names;
  for (const Column& c : columns) {
    if (c.name.empty()) {
      return absl::InvalidArgumentError("empty column name");
    }
    if (!names.insert(c.name).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate column name '", c.name, "'"));
    }
    if (c.kind.type == ColumnType::kCategorical && c.kind.level_count < 2) {
      return absl::InvalidArgumentError(absl::StrCat(
          "categorical column '", c.name, "' needs at least 2 levels"));
    }
  }
  const int n = static_cast<int>(columns.size());
  auto categorical_level_ok = [&](int col, int level) {
    return col >= 0 && col < n &&
           columns[col].kind.type == ColumnType::kCategorical && level >= 0 &&
           level < columns[col].kind.level_count;
  };
  for (size_t i = 0; i < rules.size(); ++i) {
    const StructuralZeroRule& r = rules[i];
    if (!categorical_level_ok(r.guard_column, r.guard_level) ||
        !categorical_level_ok(r.forced_column, r.forced_level) ||
        r.guard_column == r.forced_column) {
      return absl::InvalidArgumentError(
          absl::StrCat("zero rule ", i, " must reference two distinct "
                       "categorical columns with valid levels"));
    }
  }
  if (outcome_column < 0 || outcome_column >= n) {
    return absl::InvalidArgumentError("outcome column out of range");
  }
  Schema schema;
  schema.columns_ = std::move(columns);
  schema.zero_rules_ = std::move(rules);
  schema.outcome_column_ = outcome_column;
  return schema;
}

absl::StatusOr<Schema> Schema::Parse(std::string_view text) {
  std::vector<Column> columns;
  std::vector<std::vector<std::string>> rule_lines;
  std::vector<int> rule_line_numbers;
  std::string outcome;
  int line_number = 0;
  for (std::string_view line : internal::Split(text, '\n')) {
    ++line_number;
    line = internal::StripWhitespace(line);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> tokens;
    for (std::string_view t : internal::Split(line, ' ', true)) {
      tokens.emplace_back(t);
    }
    auto error = [&](std::string_view what) {
      return absl::InvalidArgumentError(
          absl::StrCat("schema line ", line_number, ": ", std::string(what)));
    };
    if (tokens[0] == "column") {
      if (tokens.size() < 3) return error("expected 'column <name> <kind>'");
      Column c{tokens[1], ColumnKind::Continuous()};
      if (tokens[2] == "continuous" && tokens.size() == 3) {
      } else if (tokens[2] == "count" && tokens.size() == 3) {
        c.kind = ColumnKind::Count();
      } else if (tokens[2] == "categorical" && tokens.size() == 4) {
        int levels = 0;
        auto [p, ec] = std::from_chars(
            tokens[3].data(), tokens[3].data() + tokens[3].size(), levels);
        if (ec != std::errc() || p != tokens[3].data() + tokens[3].size()) {
          return error("bad level count");
        }
        c.kind = ColumnKind::Categorical(levels);
      } else {
        return error(absl::StrCat("unknown column kind '", tokens[2], "'"));
      }
      columns.push_back(std::move(c));
    } else if (tokens[0] == "zero_rule") {
      if (tokens.size() != 5) {
        return error("expected 'zero_rule <guard> <level> <forced> <level>'");
      }
      rule_lines.push_back(tokens);
      rule_line_numbers.push_back(line_number);
    } else if (tokens[0] == "outcome") {
      if (tokens.size() != 2) return error("expected 'outcome <name>'");
      outcome = tokens[1];
    } else {
      return error(absl::StrCat("unknown directive '", tokens[0], "'"));
    }
  }
  auto find = [&](const std::string& name) -> int {
    for (size_t i = 0; i < columns.size(); ++i) {
      if (columns[i].name == name) return static_cast<int>(i);
    }
    return -1;
  };
  std::vector<StructuralZeroRule> rules;
  for (size_t i = 0; i < rule_lines.size(); ++i) {
    const auto& t = rule_lines[i];
    StructuralZeroRule r;
    r.guard_column = find(t[1]);
    r.forced_column = find(t[3]);
    if (!absl::SimpleAtoi(t[2], &r.guard_level) ||
        !absl::SimpleAtoi(t[4], &r.forced_level) || r.guard_column < 0 ||
        r.forced_column < 0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "schema line ", rule_line_numbers[i], ": bad zero rule"));
    }
    rules.push_back(r);
  }
  if (outcome.empty()) {
    return absl::InvalidArgumentError("schema has no outcome directive");
  }
  const int outcome_column = find(outcome);
  if (outcome_column < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("outcome column '", outcome, "' is not declared"));
  }
  return Create(std::move(columns), std::move(rules), outcome_column);
}

std::string Schema::Serialize() const {
  std::string out = "# synthbench schema v1\n";
  for (const Column& c : columns_) {
    absl::StrAppend(&out, "column ", c.name, " ",
                    std::string(KindName(c.kind.type)));
    if (c.kind.type == ColumnType::kCategorical) {
      absl::StrAppend(&out, " ", c.kind.level_count);
    }
    out += "\n";
  }
  for (const StructuralZeroRule& r : zero_rules_) {
    absl::StrAppend(&out, "zero_rule ", columns_[r.guard_column].name, " ",
                    r.guard_level, " ", columns_[r.forced_column].name, " ",
                    r.forced_level, "\n");
  }
  absl::StrAppend(&out, "outcome ", columns_[outcome_column_].name, "\n");
  return out;
}

std::optional<int> Schema::FindColumn(std::string_view name) const {
  for (int i = 0; i < num_columns(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

absl::StatusOr<Dataset> Dataset::Create(
    Schema schema, std::vector<std::vector<double>> columns) {
  if (static_cast<int>(columns.size()) != schema.num_columns()) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected ", schema.num_columns(), " columns, got ",
                     columns.size()));
  }
  const int64_t rows = columns.empty() ? 0 : columns[0].size();
  for (size_t j = 0; j < columns.size(); ++j) {
    if (static_cast<int64_t>(columns[j].size()) != rows) {
      return absl::InvalidArgumentError(absl::StrCat(
          "column '", schema.column(j).name, "' has ", columns[j].size(),
          " rows, expected ", rows));
    }
  }
  return Dataset(std::move(schema), std::move(columns), rows);
}

Dataset Dataset::Empty(Schema schema) {
  std::vector<std::vector<double>> columns(schema.num_columns());
  return Dataset(std::move(schema), std::move(columns), 0);
}

Dataset Dataset::SelectRows(std::span<const int64_t> rows) const {
  std::vector<std::vector<double>> out(columns_.size());
  for (size_t j = 0; j < columns_.size(); ++j) {
    out[j].reserve(rows.size());
    for (int64_t r : rows) out[j].push_back(columns_[j][r]);
  }
  return Dataset(schema_, std::move(out), static_cast<int64_t>(rows.size()));
}

Dataset Dataset::WithColumn(int index, std::vector<double> values) const {
  std::vector<std::vector<double>> out = columns_;
  out[index] = std::move(values);
  return Dataset(schema_, std::move(out), num_rows_);
}

std::string ViolationToString(const Violation& v, const Schema& schema) {
  switch (v.kind) {
    case ViolationKind::kStructuralZero: {
      const StructuralZeroRule& r = schema.zero_rules()[v.rule];
      return absl::StrCat("row ", v.row, ": zero rule ", v.rule, " (",
                          schema.column(r.guard_column).name, "=",
                          r.guard_level, " requires ",
                          schema.column(r.forced_column).name, "=",
                          r.forced_level, ")");
    }
    case ViolationKind::kLevelOutOfRange:
      return absl::StrCat("row ", v.row, ": level out of range in '",
                          schema.column(v.rule).name, "'");
    case ViolationKind::kNegativeCount:
      return absl::StrCat("row ", v.row, ": negative count in '",
                          schema.column(v.rule).name, "'");
    case ViolationKind::kNonInteger:
      return absl::StrCat("row ", v.row, ": non-integer value in '",
                          schema.column(v.rule).name, "'");
    case ViolationKind::kNonFinite:
      return absl::StrCat("row ", v.row, ": non-finite value in '",
                          schema.column(v.rule).name, "'");
  }
  return "unknown violation";
}

std::vector<Violation> Validate(const Dataset& data) {
  const Schema& schema = data.schema();
  std::vector<Violation> out;
  for (int64_t i = 0; i < data.num_rows(); ++i) {
    for (int j = 0; j < schema.num_columns(); ++j) {
      const double v = data.at(i, j);
      const ColumnKind& kind = schema.column(j).kind;
      if (!std::isfinite(v)) {
        out.push_back({i, j, ViolationKind::kNonFinite});
        continue;
      }
      switch (kind.type) {
        case ColumnType::kContinuous:
          break;
        case ColumnType::kCategorical:
          if (!IsIntegral(v)) {
            out.push_back({i, j, ViolationKind::kNonInteger});
          } else if (v < 0 || v >= kind.level_count) {
            out.push_back({i, j, ViolationKind::kLevelOutOfRange});
          }
          break;
        case ColumnType::kCount:
          if (!IsIntegral(v)) {
            out.push_back({i, j, ViolationKind::kNonInteger});
          } else if (v < 0) {
            out.push_back({i, j, ViolationKind::kNegativeCount});
          }
          break;
      }
    }
    const auto& rules = schema.zero_rules();
    for (size_t r = 0; r < rules.size(); ++r) {
      if (data.at(i, rules[r].guard_column) == rules[r].guard_level &&
          data.at(i, rules[r].forced_column) != rules[r].forced_level) {
        out.push_back({i, static_cast<int>(r), ViolationKind::kStructuralZero});
      }
    }
  }
  return out;
}

absl::StatusOr<OneHotEncoder> OneHotEncoder::Fit(const Dataset& train) {
  const Schema& schema = train.schema();
  std::vector<EncodedBlock> blocks;
  int offset = 0;
  for (int j = 0; j < schema.num_columns(); ++j) {
    EncodedBlock b;
    b.column = j;
    b.offset = offset;
    b.type = schema.column(j).kind.type;
    if (b.type == ColumnType::kCategorical) {
      b.width = schema.column(j).kind.level_count;
    } else {
      b.width = 1;
      std::span<const double> values = train.column(j);
      const double n = static_cast<double>(values.size());
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= n;
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      const double sd = std::sqrt(ss / n);
      if (!(sd > 0.0)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "column '", schema.column(j).name,
            "' has zero variance and cannot be standardized"));
      }
      b.mean = mean;
      b.scale = sd;
    }
    offset += b.width;
    blocks.push_back(b);
  }
  return OneHotEncoder(schema, std::move(blocks), offset);
}

OneHotEncoder OneHotEncoder::FromBlocks(Schema schema,
                                        std::vector<EncodedBlock> blocks) {
  int width = 0;
  for (const EncodedBlock& b : blocks) width += b.width;
  return OneHotEncoder(std::move(schema), std::move(blocks), width);
}

Eigen::MatrixXd OneHotEncoder::Encode(const Dataset& data) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(data.num_rows(), width_);
  for (const EncodedBlock& b : blocks_) {
    std::span<const double> values = data.column(b.column);
    for (int64_t i = 0; i < data.num_rows(); ++i) {
      if (b.type == ColumnType::kCategorical) {
        out(i, b.offset + static_cast<int>(values[i])) = 1.0;
      } else {
        out(i, b.offset) = (values[i] - b.mean) / b.scale;
      }
    }
  }
  return out;
}

Dataset OneHotEncoder::Decode(const Eigen::MatrixXd& encoded) const {
  const int64_t rows = encoded.rows();
  std::vector<std::vector<double>> columns(schema_.num_columns());
  for (const EncodedBlock& b : blocks_) {
    std::vector<double>& col = columns[b.column];
    col.resize(rows);
    for (int64_t i = 0; i < rows; ++i) {
      if (b.type == ColumnType::kCategorical) {
        int best = 0;
        for (int k = 1; k < b.width; ++k) {
          if (encoded(i, b.offset + k) > encoded(i, b.offset + best)) best = k;
        }
        col[i] = best;
      } else {
        double v = encoded(i, b.offset) * b.scale + b.mean;
        if (b.type == ColumnType::kCount) v = std::max(0.0, std::round(v));
        col[i] = v;
      }
    }
  }
  return *Dataset::Create(schema_, std::move(columns));
}

absl::StatusOr<Dataset> ParseCsv(std::string_view text, const Schema& schema) {
  std::vector<std::string_view> lines = internal::Split(text, '\n');
  while (!lines.empty() && internal::StripWhitespace(lines.back()).empty()) {
    lines.pop_back();
  }
  if (lines.empty()) {
    return absl::InvalidArgumentError("csv: missing header row");
  }
  std::vector<std::string_view> header = internal::Split(lines[0], ',');
  const int n_cols = schema.num_columns();
  // position in the file -> schema column
  std::vector<int> mapping;
  std::vector<bool> seen(n_cols, false);
  for (std::string_view h : header) {
    h = internal::StripWhitespace(h);
    std::optional<int> col = schema.FindColumn(h);
    if (!col.has_value()) {
      return absl::InvalidArgumentError(
          absl::StrCat("csv: unknown column '", std::string(h), "' in header"));
    }
    if (seen[*col]) {
      return absl::InvalidArgumentError(
          absl::StrCat("csv: duplicate column '", std::string(h), "' in header"));
    }
    seen[*col] = true;
    mapping.push_back(*col);
  }
  for (int j = 0; j < n_cols; ++j) {
    if (!seen[j]) {
      return absl::InvalidArgumentError(absl::StrCat(
          "csv: schema mismatch, header lacks column '",
          schema.column(j).name, "'"));
    }
  }
  std::vector<std::vector<double>> columns(n_cols);
  for (size_t li = 1; li < lines.size(); ++li) {
    std::vector<std::string_view> cells = internal::Split(lines[li], ',');
    const int64_t row = static_cast<int64_t>(li) - 1;
    if (cells.size() != mapping.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("csv: row ", row, " has ", cells.size(),
                       " cells, expected ", mapping.size()));
    }
    for (size_t k = 0; k < cells.size(); ++k) {
      const int j = mapping[k];
      const Column& c = schema.column(j);
      absl::StatusOr<double> value = ParseDouble(cells[k]);
      if (!value.ok()) {
        return absl::InvalidArgumentError(
            absl::StrCat("csv: row ", row, ", column '", c.name,
                         "': ", value.status().message()));
      }
      if (c.kind.type == ColumnType::kCategorical &&
          (!IsIntegral(*value) || *value < 0 ||
           *value >= c.kind.level_count)) {
        return absl::OutOfRangeError(absl::StrCat(
            "csv: row ", row, ", column '", c.name, "': level ",
            std::string(cells[k]), " outside [0, ", c.kind.level_count, ")"));
      }
      if (c.kind.type == ColumnType::kCount &&
          (!IsIntegral(*value) || *value < 0)) {
        return absl::OutOfRangeError(
            absl::StrCat("csv: row ", row, ", column '", c.name,
                         "': count ", std::string(cells[k]), " is not a non-negative "
                         "integer"));
      }
      columns[j].push_back(*value);
    }
  }
  return Dataset::Create(schema, std::move(columns));
}

absl::StatusOr<Dataset> ReadCsv(const std::string& path,
                                const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open ", path));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseCsv(buffer.str(), schema);
}

std::string FormatCsv(const Dataset& data) {
  const Schema& schema = data.schema();
  std::string out;
  for (int j = 0; j < schema.num_columns(); ++j) {
    if (j > 0) out += ',';
    out += schema.column(j).name;
  }
  out += '\n';
  for (int64_t i = 0; i < data.num_rows(); ++i) {
    for (int j = 0; j < schema.num_columns(); ++j) {
      if (j > 0) out += ',';
      const double v = data.at(i, j);
      if (schema.column(j).kind.type != ColumnType::kContinuous &&
          IsIntegral(v)) {
        absl::StrAppend(&out, static_cast<int64_t>(v));
      } else {
        out += FormatDouble(v);
      }
    }
    out += '\n';
  }
  return out;
}

absl::Status WriteCsv(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot open ", path, " for writing"));
  }
  out << FormatCsv(data);
  if (!out) return absl::InternalError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<std::pair<Dataset, Dataset>> SplitHoldout(const Dataset& data,
                                                         double test_fraction,
                                                         uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    return absl::InvalidArgumentError("fraction must lie in (0, 1)");
  }
  const int64_t n = data.num_rows();
  const int64_t n_test =
      static_cast<int64_t>(std::llround(test_fraction * static_cast<double>(n)));
  if (n_test == 0 || n_test == n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "fraction ", test_fraction, " of ", n, " rows leaves a part empty"));
  }
  std::vector<int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int64_t> test(order.begin(), order.begin() + n_test);
  std::vector<int64_t> train(order.begin() + n_test, order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return std::make_pair(data.SelectRows(train), data.SelectRows(test));
}

}  // namespace synthbench
