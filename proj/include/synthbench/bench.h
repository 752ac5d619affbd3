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

// Monte Carlo benchmark: l training sets x m synthesizer fits x n releases
// for every (training size, epsilon) pair of the plan, scored with the nine
// summary measures.
//
// Every random stream is keyed by its grid position (see seeding.h), so the
// outputs are byte-identical for any worker count.

#ifndef SYNTHBENCH_BENCH_H_
#define SYNTHBENCH_BENCH_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "synthbench/dgp.h"
#include "synthbench/metrics.h"
#include "synthbench/synth.h"

namespace synthbench {

struct BenchPlan {
  int scenario = 1;
  int l = 10;
  int m = 10;
  int n = 10;
  std::vector<int64_t> n_train = {500, 10000, 100000};
  std::vector<double> epsilon = {0.1, 1.0, 5.0};
  // Kind and hyperparameters; the budget and seed are filled per cell.
  SynthesizerSpec synthesizer;
  NormalParameter normal_parameter = NormalParameter::kVariance;
  std::optional<uint64_t> seed;
  int wasserstein_null_iters = kDefaultWassersteinNullIters;
  int pmse_null_iters = kDefaultPmseNullIters;
  CartConfig cart;
  double coverage_level = 0.9;
  int workers = 1;
  std::string output_dir = "bench_out";

  absl::Status Check() const;
};

// Sets one `key = value` entry. Shared by the config parser and CLI flags.
absl::Status SetPlanKey(BenchPlan& plan, std::string_view key,
                        std::string_view value);

// Lines of `key = value`; '#' starts a comment. Errors name the line and key.
absl::StatusOr<BenchPlan> ParsePlan(std::string_view text);
absl::StatusOr<BenchPlan> LoadPlan(const std::string& path);

struct SubPlan {
  int index = 0;
  int64_t n_train = 0;
  double epsilon = 0.0;
  PrivacyBudget budget;
  uint64_t seed = 0;
};

// Cartesian product of the training sizes and epsilons, delta = 1 / (2 N).
// `seed` of each entry is derived from the plan seed (0 when unset).
std::vector<SubPlan> DisciplinesGrid(const BenchPlan& plan);

// Table order.
inline constexpr int kNumScores = 9;

struct NineScores {
  double training_wasserstein = 0.0;
  double training_pmse = 0.0;
  double generalisation_wasserstein = 0.0;
  double generalisation_pmse = 0.0;
  double generalisation_coverage = 0.0;
  double generalisation_bias = 0.0;
  double generalisation_rmse = 0.0;
  double training_covariance_ratio = 0.0;
  double training_bias = 0.0;

  std::array<double, kNumScores> AsArray() const;
  static NineScores FromArray(const std::array<double, kNumScores>& v);
  // Machine keys, as used in cells.csv and scores.json.
  static const std::array<std::string_view, kNumScores>& Keys();
  // Human-readable labels.
  static const std::array<std::string_view, kNumScores>& Labels();
};

struct CellResult {
  int l = 0;
  int m = 0;
  int n = 0;
  bool ok = false;
  std::string error;
  NineScores scores;
  double realized_epsilon = 0.0;
  // Structural-zero violation rate of the release before enforcement.
  double raw_zero_rate = 0.0;
  // Validation failures of the released data; must be zero.
  int64_t violations = 0;
  double seconds = 0.0;
};

struct RubinDiagnostic {
  // Mean coverage over (training set, fit, coefficient) of the combined
  // intervals across the n releases of each fit.
  double coverage = 0.0;
  double uncongenial_coverage = 0.0;
  int combined = 0;
};

struct SubPlanResult {
  SubPlan sub_plan;
  std::vector<CellResult> cells;
  int failures = 0;
  NineScores scores;
  // Mean over l of the mean over m of the mean over n.
  NineScores hierarchical;
  double min_realized_epsilon = 0.0;
  double max_realized_epsilon = 0.0;
  std::optional<RubinDiagnostic> rubin;
};

struct BenchResult {
  BenchPlan plan;
  double rmse_floor = 0.0;
  std::vector<SubPlanResult> sub_plans;
};

// Fails when more than 10% of the cells of a sub-plan fail.
absl::StatusOr<BenchResult> RunPlan(const BenchPlan& plan);

std::string FormatCellsCsv(const BenchResult& result);
std::string FormatScoresJson(const BenchResult& result);

// cells.csv and scores.json under plan.output_dir.
absl::Status WriteBenchOutputs(const BenchResult& result);

}  // namespace synthbench

#endif  // SYNTHBENCH_BENCH_H_
