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

#include <cmath>
#include <utility>

#include "oracles/oracles.h"

namespace synthbench::oracle {

NormalEquationsFit SolveNormalEquations(
    const std::vector<std::vector<double>>& x_rows,
    const std::vector<double>& y) {
  const size_t n = x_rows.size();
  const size_t p = x_rows.front().size();
  // Augmented [X'X | I | X'y].
  std::vector<std::vector<double>> m(p, std::vector<double>(2 * p + 1, 0.0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t a = 0; a < p; ++a) {
      for (size_t b = 0; b < p; ++b) m[a][b] += x_rows[i][a] * x_rows[i][b];
      m[a][2 * p] += x_rows[i][a] * y[i];
    }
  }
  for (size_t a = 0; a < p; ++a) m[a][p + a] = 1.0;
  for (size_t col = 0; col < p; ++col) {
    size_t pivot = col;
    for (size_t r = col + 1; r < p; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    std::swap(m[col], m[pivot]);
    const double d = m[col][col];
    for (double& v : m[col]) v /= d;
    for (size_t r = 0; r < p; ++r) {
      if (r == col) continue;
      const double factor = m[r][col];
      for (size_t c = 0; c < 2 * p + 1; ++c) m[r][c] -= factor * m[col][c];
    }
  }
  NormalEquationsFit fit;
  for (size_t a = 0; a < p; ++a) fit.coefficients.push_back(m[a][2 * p]);
  double rss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double pred = 0.0;
    for (size_t a = 0; a < p; ++a) pred += x_rows[i][a] * fit.coefficients[a];
    rss += (y[i] - pred) * (y[i] - pred);
  }
  fit.residual_variance = rss / static_cast<double>(n - p);
  fit.covariance.assign(p, std::vector<double>(p));
  for (size_t a = 0; a < p; ++a) {
    for (size_t b = 0; b < p; ++b) {
      fit.covariance[a][b] = fit.residual_variance * m[a][p + b];
    }
  }
  return fit;
}

}  // namespace synthbench::oracle
