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

// Scenario 1 data generating process: continuous, discrete and count
// attributes with one structural-zero constraint.
//
//   x1 ~ N(5, 2)            x2 ~ N(-3, 1)         x3 ~ Bernoulli(0.7)
//   x4 ~ NB(p=0.8, r=30)    x5 ~ Cat(0.2, 0.3, 0.5)
//   x6 ~ N(x3, 50)          w1 ~ Bernoulli(0.5)   w2 ~ Bernoulli(0.3 w1)
//   y  ~ N(x1 + x2 + x3 + x4 + x1 x4, 20)
//
// The second Normal argument is read as a variance by default; the
// standard-deviation reading is available for comparison runs.

#ifndef SYNTHBENCH_DGP_H_
#define SYNTHBENCH_DGP_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "synthbench/tabular.h"

namespace synthbench {

enum class NormalParameter { kVariance, kStandardDeviation };

absl::StatusOr<NormalParameter> ParseNormalParameter(std::string_view text);
std::string_view NormalParameterName(NormalParameter convention);

struct Scenario1Params {
  double x1_mean = 5.0;
  double x1_sd = 0.0;
  double x2_mean = -3.0;
  double x2_sd = 0.0;
  double x3_p = 0.7;
  double x4_p = 0.8;
  int x4_r = 30;
  std::array<double, 3> x5_probs = {0.2, 0.3, 0.5};
  double x6_sd = 0.0;
  double w1_p = 0.5;
  double w2_scale = 0.3;
  double y_noise_sd = 0.0;

  static Scenario1Params ForConvention(NormalParameter convention);
  absl::Status Check() const;
};

// Column order: x1, x2, x3, x4, x5, x6, w1, w2, y.
Schema Scenario1Schema();

absl::StatusOr<Dataset> GenerateScenario1(int64_t n, uint64_t seed,
                                          const Scenario1Params& params);

// Outcome formula of the analysis model: y ~ 1 + x1 + x2 + x3 + x4 + x1:x4.
struct LinearFormula {
  int outcome = 0;
  // Each term is a product of the listed columns.
  std::vector<std::vector<int>> terms;
  bool intercept = true;
  std::vector<std::string> term_names;

  int num_coefficients() const {
    return static_cast<int>(terms.size()) + (intercept ? 1 : 0);
  }
};

LinearFormula Scenario1Formula();

struct TrueParams {
  // Ordered as LinearFormula coefficients (intercept first).
  Eigen::VectorXd coefficients;
  double noise_sd = 0.0;
};

TrueParams Scenario1TrueParams(const Scenario1Params& params);

}  // namespace synthbench

#endif  // SYNTHBENCH_DGP_H_
