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

#include "synthbench/inference.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "boost/math/distributions/normal.hpp"

namespace synthbench {

absl::StatusOr<CombinedEstimate> Combine(
    std::span<const PointEstimate> estimates) {
  const int m = static_cast<int>(estimates.size());
  if (m < 2) {
    return absl::InvalidArgumentError(absl::StrCat(
        "combining needs at least 2 estimates, got ", m));
  }
  const Eigen::Index p = estimates.front().coefficients.size();
  for (const PointEstimate& e : estimates) {
    if (e.coefficients.size() != p || e.variances.size() != p) {
      return absl::InvalidArgumentError("estimates differ in layout");
    }
  }
  CombinedEstimate ce;
  ce.m = m;
  ce.mean = Eigen::VectorXd::Zero(p);
  ce.within = Eigen::VectorXd::Zero(p);
  for (const PointEstimate& e : estimates) {
    ce.mean += e.coefficients;
    ce.within += e.variances;
  }
  ce.mean /= m;
  ce.within /= m;
  ce.between = Eigen::VectorXd::Zero(p);
  for (const PointEstimate& e : estimates) {
    ce.between += (e.coefficients - ce.mean).array().square().matrix();
  }
  ce.between /= (m - 1);
  ce.total = ce.within + (1.0 + 1.0 / m) * ce.between;
  ce.uncongenial = 2.0 * ce.total;
  return ce;
}

PointEstimate EstimateOf(const RegressionFit& fit) {
  return {fit.coefficients, fit.covariance.diagonal()};
}

absl::StatusOr<CombinedInterval> CombinedIntervals(const CombinedEstimate& ce,
                                                   double level) {
  if (!(level > 0.0 && level < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("interval level must lie in (0, 1), got ", level));
  }
  const double z =
      boost::math::quantile(boost::math::normal(), (1.0 + level) / 2.0);
  CombinedInterval out;
  for (Eigen::Index j = 0; j < ce.mean.size(); ++j) {
    const double h = z * std::sqrt(ce.total(j));
    const double h_uc = z * std::sqrt(ce.uncongenial(j));
    out.standard.push_back({ce.mean(j) - h, ce.mean(j) + h});
    out.uncongenial.push_back({ce.mean(j) - h_uc, ce.mean(j) + h_uc});
  }
  return out;
}

}  // namespace synthbench
