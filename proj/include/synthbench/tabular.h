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

// Column-typed tabular data shared by the generators, synthesizers and
// quality metrics.
//
// All cells are stored as doubles in column-major order. Categorical cells
// hold an integer level index in [0, level_count), count cells hold a
// non-negative integer value. A Dataset may temporarily hold cells that break
// these rules (for example raw generator output); Validate() reports them.

#ifndef SYNTHBENCH_TABULAR_H_
#define SYNTHBENCH_TABULAR_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace synthbench {

enum class ColumnType { kContinuous, kCategorical, kCount };

struct ColumnKind {
  ColumnType type = ColumnType::kContinuous;
  // Only meaningful for kCategorical.
  int level_count = 0;

  static ColumnKind Continuous() { return {ColumnType::kContinuous, 0}; }
  static ColumnKind Categorical(int levels) {
    return {ColumnType::kCategorical, levels};
  }
  static ColumnKind Count() { return {ColumnType::kCount, 0}; }

  bool operator==(const ColumnKind&) const = default;
};

struct Column {
  std::string name;
  ColumnKind kind;

  bool operator==(const Column&) const = default;
};

// Whenever row[guard_column] == guard_level, a valid row must have
// row[forced_column] == forced_level.
struct StructuralZeroRule {
  int guard_column = 0;
  int guard_level = 0;
  int forced_column = 0;
  int forced_level = 0;

  bool operator==(const StructuralZeroRule&) const = default;
};

class Schema {
 public:
  Schema() = default;

  // Checks unique names, categorical level counts >= 2, and that every zero
  // rule references categorical columns with in-range levels.
  static absl::StatusOr<Schema> Create(std::vector<Column> columns,
                                       std::vector<StructuralZeroRule> rules,
                                       int outcome_column);

  // Declarative text form:
  //
  //   column <name> continuous|count|categorical <levels>
  //   zero_rule <guard> <guard_level> <forced> <forced_level>
  //   outcome <name>
  //
  // Blank lines and lines starting with '#' are ignored.
  static absl::StatusOr<Schema> Parse(std::string_view text);
  std::string Serialize() const;

  int num_columns() const { return static_cast<int>(columns_.size()); }
  const std::vector<Column>& columns() const { return columns_; }
  const Column& column(int index) const { return columns_[index]; }
  const std::vector<StructuralZeroRule>& zero_rules() const {
    return zero_rules_;
  }
  int outcome_column() const { return outcome_column_; }
  std::optional<int> FindColumn(std::string_view name) const;

  bool operator==(const Schema&) const = default;

 private:
  std::vector<Column> columns_;
  std::vector<StructuralZeroRule> zero_rules_;
  int outcome_column_ = 0;
};

class Dataset {
 public:
  Dataset() = default;

  // `columns` must have one entry per schema column, all of equal length.
  static absl::StatusOr<Dataset> Create(Schema schema,
                                        std::vector<std::vector<double>> columns);
  static Dataset Empty(Schema schema);

  const Schema& schema() const { return schema_; }
  int64_t num_rows() const { return num_rows_; }
  int num_columns() const { return schema_.num_columns(); }
  std::span<const double> column(int index) const { return columns_[index]; }
  double at(int64_t row, int col) const { return columns_[col][row]; }

  Dataset SelectRows(std::span<const int64_t> rows) const;
  // Copy with one column replaced; used by transformations that rewrite cells.
  Dataset WithColumn(int index, std::vector<double> values) const;

  bool operator==(const Dataset&) const = default;

 private:
  Dataset(Schema schema, std::vector<std::vector<double>> columns,
          int64_t rows)
      : schema_(std::move(schema)),
        columns_(std::move(columns)),
        num_rows_(rows) {}

  Schema schema_;
  std::vector<std::vector<double>> columns_;
  int64_t num_rows_ = 0;
};

enum class ViolationKind {
  kStructuralZero,
  kLevelOutOfRange,
  kNegativeCount,
  kNonInteger,
  kNonFinite,
};

struct Violation {
  int64_t row = 0;
  // Zero-rule index for kStructuralZero, column index otherwise.
  int rule = 0;
  ViolationKind kind = ViolationKind::kStructuralZero;

  bool operator==(const Violation&) const = default;
};

std::string ViolationToString(const Violation& violation,
                              const Schema& schema);

// Every structural-zero and domain violation, in row order.
std::vector<Violation> Validate(const Dataset& data);

// Block of encoded columns produced by one source column.
struct EncodedBlock {
  int column = 0;
  int offset = 0;
  int width = 0;
  ColumnType type = ColumnType::kContinuous;
  // Standardization for continuous and count columns.
  double mean = 0.0;
  double scale = 1.0;
};

// One-hot / standardizing encoder. Parameters are fitted once (on training
// data) and then reused for any dataset with the same schema.
class OneHotEncoder {
 public:
  OneHotEncoder() = default;

  static absl::StatusOr<OneHotEncoder> Fit(const Dataset& train);
  static OneHotEncoder FromBlocks(Schema schema,
                                  std::vector<EncodedBlock> blocks);

  int width() const { return width_; }
  const std::vector<EncodedBlock>& blocks() const { return blocks_; }
  const Schema& schema() const { return schema_; }

  // Rows are examples.
  Eigen::MatrixXd Encode(const Dataset& data) const;
  // Categorical blocks decode to the argmax level (lowest index on ties);
  // count columns are rounded and floored at zero.
  Dataset Decode(const Eigen::MatrixXd& encoded) const;

 private:
  OneHotEncoder(Schema schema, std::vector<EncodedBlock> blocks, int width)
      : schema_(std::move(schema)), blocks_(std::move(blocks)),
        width_(width) {}

  Schema schema_;
  std::vector<EncodedBlock> blocks_;
  int width_ = 0;
};

absl::StatusOr<Dataset> ReadCsv(const std::string& path, const Schema& schema);
absl::StatusOr<Dataset> ParseCsv(std::string_view text, const Schema& schema);
absl::Status WriteCsv(const Dataset& data, const std::string& path);
std::string FormatCsv(const Dataset& data);

// `test_fraction` of the rows (rounded) go to the second part.
absl::StatusOr<std::pair<Dataset, Dataset>> SplitHoldout(const Dataset& data,
                                                         double test_fraction,
                                                         uint64_t seed);

}  // namespace synthbench

#endif  // SYNTHBENCH_TABULAR_H_
