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

// Ordinary least squares through a Householder QR of the design matrix.

#include <cmath>

#include "absl/strings/str_cat.h"
#include "boost/math/distributions/students_t.hpp"
#include "synthbench/metrics.h"

namespace synthbench {
namespace {

// |R_jj| below this fraction of the column norm counts as dependence.
constexpr double kRankTolerance = 1e-10;

}  // namespace

Eigen::MatrixXd DesignMatrix(const Dataset& data,
                             const LinearFormula& formula) {
  const int64_t n = data.num_rows();
  Eigen::MatrixXd x(n, formula.num_coefficients());
  int j = 0;
  if (formula.intercept) x.col(j++).setOnes();
  for (const std::vector<int>& term : formula.terms) {
    for (int64_t i = 0; i < n; ++i) {
      double v = 1.0;
      for (int c : term) v *= data.at(i, c);
      x(i, j) = v;
    }
    ++j;
  }
  return x;
}

absl::StatusOr<RegressionFit> OlsFit(const Dataset& data,
                                     const LinearFormula& formula) {
  const int64_t n = data.num_rows();
  const int p = formula.num_coefficients();
  if (n <= p) {
    return absl::InvalidArgumentError(
        absl::StrCat("ols: need more rows than coefficients (", n, " <= ", p,
                     ")"));
  }
  const Eigen::MatrixXd x = DesignMatrix(data, formula);
  std::span<const double> y_span = data.column(formula.outcome);
  const Eigen::Map<const Eigen::VectorXd> y(y_span.data(), n);

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  const Eigen::MatrixXd r =
      qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  for (int j = 0; j < p; ++j) {
    const double norm = x.col(j).norm();
    if (norm == 0.0 || std::abs(r(j, j)) <= kRankTolerance * norm) {
      const std::string name = j < static_cast<int>(formula.term_names.size())
                                   ? formula.term_names[j]
                                   : absl::StrCat("column ", j);
      return absl::FailedPreconditionError(
          absl::StrCat("ols: design matrix is rank deficient at '", name,
                       "'"));
    }
  }
  RegressionFit fit;
  fit.n = n;
  fit.p = p;
  fit.names = formula.term_names;
  fit.coefficients = qr.solve(y);
  const Eigen::VectorXd residual = y - x * fit.coefficients;
  fit.residual_variance = residual.squaredNorm() / static_cast<double>(n - p);
  // (X'X)^-1 = R^-1 R^-T.
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  Eigen::MatrixXd cov = fit.residual_variance * r_inv * r_inv.transpose();
  fit.covariance = (cov + cov.transpose()) / 2.0;
  return fit;
}

std::vector<Interval> ConfidenceIntervals(const RegressionFit& fit,
                                          double level) {
  const boost::math::students_t dist(static_cast<double>(fit.n - fit.p));
  const double t = boost::math::quantile(dist, (1.0 + level) / 2.0);
  std::vector<Interval> out(fit.p);
  for (int j = 0; j < fit.p; ++j) {
    const double half = t * std::sqrt(fit.covariance(j, j));
    out[j] = {fit.coefficients(j) - half, fit.coefficients(j) + half};
  }
  return out;
}

}  // namespace synthbench
