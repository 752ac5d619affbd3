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

#include "synthbench/dgp.h"

#include <cmath>
#include <random>

#include "absl/strings/str_cat.h"

namespace synthbench {
namespace {

enum Scenario1Column { kX1, kX2, kX3, kX4, kX5, kX6, kW1, kW2, kY };

bool IsProbability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

absl::StatusOr<NormalParameter> ParseNormalParameter(std::string_view text) {
  if (text == "variance") return NormalParameter::kVariance;
  if (text == "sd") return NormalParameter::kStandardDeviation;
  return absl::InvalidArgumentError(
      absl::StrCat("normal parameter must be 'variance' or 'sd', got '",
                   std::string(text), "'"));
}

std::string_view NormalParameterName(NormalParameter convention) {
  return convention == NormalParameter::kVariance ? "variance" : "sd";
}

Scenario1Params Scenario1Params::ForConvention(NormalParameter convention) {
  auto sd = [convention](double v) {
    return convention == NormalParameter::kVariance ? std::sqrt(v) : v;
  };
  Scenario1Params p;
  p.x1_sd = sd(2.0);
  p.x2_sd = sd(1.0);
  p.x6_sd = sd(50.0);
  p.y_noise_sd = sd(20.0);
  return p;
}

absl::Status Scenario1Params::Check() const {
  double total = 0.0;
  for (double p : x5_probs) {
    if (!IsProbability(p)) {
      return absl::InvalidArgumentError("x5 probability outside [0, 1]");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    return absl::InvalidArgumentError("x5 probabilities must sum to 1");
  }
  if (!IsProbability(x3_p) || !IsProbability(x4_p) || !IsProbability(w1_p) ||
      !IsProbability(w2_scale) || x4_p == 0.0) {
    return absl::InvalidArgumentError("probability parameter outside [0, 1]");
  }
  if (!(x1_sd > 0 && x2_sd > 0 && x6_sd > 0 && y_noise_sd > 0) || x4_r <= 0) {
    return absl::InvalidArgumentError("scale parameters must be positive");
  }
  return absl::OkStatus();
}

Schema Scenario1Schema() {
  std::vector<Column> columns = {
      {"x1", ColumnKind::Continuous()},  {"x2", ColumnKind::Continuous()},
      {"x3", ColumnKind::Categorical(2)}, {"x4", ColumnKind::Count()},
      {"x5", ColumnKind::Categorical(3)}, {"x6", ColumnKind::Continuous()},
      {"w1", ColumnKind::Categorical(2)}, {"w2", ColumnKind::Categorical(2)},
      {"y", ColumnKind::Continuous()},
  };
  std::vector<StructuralZeroRule> rules = {{kW1, 0, kW2, 0}};
  return *Schema::Create(std::move(columns), std::move(rules), kY);
}

absl::StatusOr<Dataset> GenerateScenario1(int64_t n, uint64_t seed,
                                          const Scenario1Params& params) {
  if (n < 0) return absl::InvalidArgumentError("row count must be >= 0");
  if (absl::Status s = params.Check(); !s.ok()) return s;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> std_normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::negative_binomial_distribution<int> x4_dist(params.x4_r, params.x4_p);

  std::vector<std::vector<double>> cols(9, std::vector<double>(n));
  for (int64_t i = 0; i < n; ++i) {
    const double x1 = params.x1_mean + params.x1_sd * std_normal(rng);
    const double x2 = params.x2_mean + params.x2_sd * std_normal(rng);
    const double x3 = uniform(rng) < params.x3_p ? 1.0 : 0.0;
    const double x4 = x4_dist(rng);
    const double u5 = uniform(rng);
    double x5 = 2.0;
    if (u5 < params.x5_probs[0]) {
      x5 = 0.0;
    } else if (u5 < params.x5_probs[0] + params.x5_probs[1]) {
      x5 = 1.0;
    }
    const double x6 = x3 + params.x6_sd * std_normal(rng);
    const double w1 = uniform(rng) < params.w1_p ? 1.0 : 0.0;
    const double w2 = uniform(rng) < params.w2_scale * w1 ? 1.0 : 0.0;
    const double y =
        x1 + x2 + x3 + x4 + x1 * x4 + params.y_noise_sd * std_normal(rng);
    cols[kX1][i] = x1;
    cols[kX2][i] = x2;
    cols[kX3][i] = x3;
    cols[kX4][i] = x4;
    cols[kX5][i] = x5;
    cols[kX6][i] = x6;
    cols[kW1][i] = w1;
    cols[kW2][i] = w2;
    cols[kY][i] = y;
  }
  return Dataset::Create(Scenario1Schema(), std::move(cols));
}

LinearFormula Scenario1Formula() {
  LinearFormula f;
  f.outcome = kY;
  f.terms = {{kX1}, {kX2}, {kX3}, {kX4}, {kX1, kX4}};
  f.intercept = true;
  f.term_names = {"(intercept)", "x1", "x2", "x3", "x4", "x1:x4"};
  return f;
}

TrueParams Scenario1TrueParams(const Scenario1Params& params) {
  TrueParams t;
  t.coefficients.resize(6);
  t.coefficients << 0.0, 1.0, 1.0, 1.0, 1.0, 1.0;
  t.noise_sd = params.y_noise_sd;
  return t;
}

}  // namespace synthbench
