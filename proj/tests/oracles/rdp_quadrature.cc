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

#include <algorithm>
#include <cmath>
#include <limits>

#include "oracles/oracles.h"

namespace synthbench::oracle {

double RdpByQuadrature(double q, double sigma, double alpha) {
  const double s2 = sigma * sigma;
  // log of the integrand f(z) = phi_s(z) * ((1-q) + q exp((2z-1)/(2 s^2)))^a.
  auto log_f = [&](double z) {
    const double log_base = -z * z / (2 * s2) - 0.5 * std::log(2 * M_PI * s2);
    const double t = (2 * z - 1) / (2 * s2);
    // log((1-q) + q e^t), computed stably.
    const double a = std::log1p(-q);
    const double b = std::log(q) + t;
    const double hi = std::max(a, b);
    const double mix = hi + std::log(std::exp(a - hi) + std::exp(b - hi));
    return log_base + alpha * mix;
  };
  // The integrand peaks between 0 and about alpha; cover it generously.
  const double lo = -40.0 * sigma - 2.0;
  const double hi = alpha + 40.0 * sigma + 2.0;
  const double h = std::min(sigma, 1.0) / 400.0;
  const int64_t steps = static_cast<int64_t>(std::ceil((hi - lo) / h));
  const double step = (hi - lo) / steps;
  double peak = -std::numeric_limits<double>::infinity();
  for (int64_t k = 0; k <= steps; ++k) peak = std::max(peak, log_f(lo + k * step));
  // Composite Simpson on exp(log_f - peak); steps is made even.
  const int64_t n = steps % 2 == 0 ? steps : steps + 1;
  const double hs = (hi - lo) / n;
  double sum = 0.0;
  for (int64_t k = 0; k <= n; ++k) {
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    sum += w * std::exp(log_f(lo + k * hs) - peak);
  }
  const double log_a = peak + std::log(sum * hs / 3.0);
  return log_a / (alpha - 1.0);
}

double EpsilonByQuadrature(double q, double sigma, int64_t steps, double delta,
                           const std::vector<double>& orders) {
  double best = std::numeric_limits<double>::infinity();
  for (double alpha : orders) {
    const double eps = steps * RdpByQuadrature(q, sigma, alpha) +
                       std::log(1.0 / delta) / (alpha - 1.0);
    best = std::min(best, eps);
  }
  return best;
}

}  // namespace synthbench::oracle
