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

// Score normalization and the nine-axis radar chart.
//
// Each score becomes a deviation from its ideal. The worst deviation on an
// axis is 1.1 times the deviation of an anchor run, and the radius is
// 1 - clamp(deviation / worst, 0, 1), so the ideal sits on the outer ring and
// the anchor run lands just inside the center.

#ifndef SYNTHBENCH_REPORT_H_
#define SYNTHBENCH_REPORT_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "synthbench/bench.h"

namespace synthbench {

inline constexpr double kAnchorSlack = 1.1;

struct RadarAxis {
  std::string label;
  double ideal = 0.0;
  double observed = 0.0;
  double deviation = 0.0;
  double worst_deviation = 0.0;
  double radius = 0.0;
};

struct RadarSpec {
  std::string title;
  std::vector<RadarAxis> axes;
};

// Ideals: Wasserstein ratios 0, pMSE ratios 1, coverage `coverage_level`,
// biases 0, covariance ratio 1, prediction RMSE `rmse_floor`. Without an
// anchor the scores anchor themselves.
absl::StatusOr<RadarSpec> NormalizeScores(
    const NineScores& scores, const std::optional<NineScores>& anchor,
    double rmse_floor, double coverage_level = 0.9);

std::string RenderRadarSvg(const RadarSpec& spec);
absl::Status WriteRadar(const RadarSpec& spec, const std::string& path);

struct ScoresFileEntry {
  int64_t n_train = 0;
  double epsilon = 0.0;
  NineScores scores;
};

struct ScoresFile {
  std::string synthesizer;
  double rmse_floor = 0.0;
  std::vector<ScoresFileEntry> entries;
};

absl::StatusOr<ScoresFile> ParseScoresJson(std::string_view text);
absl::StatusOr<ScoresFile> LoadScoresJson(const std::string& path);

// Markdown table, one row per sub-plan.
std::string FormatScoresTable(const ScoresFile& file);

}  // namespace synthbench

#endif  // SYNTHBENCH_REPORT_H_
