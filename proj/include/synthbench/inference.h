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

// Combining estimates across m synthetic datasets (Rubin's rules), with the
// doubled variance that guards against an uncongenial synthesis model.

#ifndef SYNTHBENCH_INFERENCE_H_
#define SYNTHBENCH_INFERENCE_H_

#include <span>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "synthbench/metrics.h"

namespace synthbench {

struct PointEstimate {
  Eigen::VectorXd coefficients;
  // Per-coefficient variances (the diagonal of the covariance).
  Eigen::VectorXd variances;
};

struct CombinedEstimate {
  Eigen::VectorXd mean;
  // Mean within-dataset variance.
  Eigen::VectorXd within;
  // Between-dataset variance, divisor m - 1.
  Eigen::VectorXd between;
  // within + (1 + 1/m) between.
  Eigen::VectorXd total;
  // 2 * total.
  Eigen::VectorXd uncongenial;
  int m = 0;
};

absl::StatusOr<CombinedEstimate> Combine(
    std::span<const PointEstimate> estimates);

PointEstimate EstimateOf(const RegressionFit& fit);

struct CombinedInterval {
  std::vector<Interval> standard;
  std::vector<Interval> uncongenial;
};

// mean +- z sqrt(u) with the normal quantile z for `level`.
absl::StatusOr<CombinedInterval> CombinedIntervals(const CombinedEstimate& ce,
                                                   double level);

}  // namespace synthbench

#endif  // SYNTHBENCH_INFERENCE_H_
