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

#include "synthbench/accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "absl/strings/str_cat.h"

namespace synthbench {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Relative accuracy of the sigma bisection.
constexpr double kSigmaAccuracy = 1e-3;

double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// log(exp(a) - exp(b)) for a >= b.
double LogSub(double a, double b) {
  if (b == kNegInf) return a;
  if (a <= b) return kNegInf;
  return a + std::log1p(-std::exp(b - a));
}

// log(erfc(x)), stable for large positive x.
double LogErfc(double x) {
  if (x < 5.0) return std::log(std::erfc(x));
  // Asymptotic expansion erfc(x) ~ exp(-x^2) / (x sqrt(pi)) * S(x).
  const double inv2 = 1.0 / (x * x);
  const double series = 1.0 - 0.5 * inv2 + 0.75 * inv2 * inv2 -
                        1.875 * inv2 * inv2 * inv2 +
                        6.5625 * inv2 * inv2 * inv2 * inv2;
  return -x * x - std::log(x) - 0.5 * std::log(std::numbers::pi) +
         std::log(series);
}

double LogBinomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double LogAInteger(double q, double sigma, int alpha) {
  double log_a = kNegInf;
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  for (int k = 0; k <= alpha; ++k) {
    const double term = LogBinomial(alpha, k) + k * log_q +
                        (alpha - k) * log_1mq +
                        (static_cast<double>(k) * k - k) / (2 * sigma * sigma);
    log_a = LogAdd(log_a, term);
  }
  return log_a;
}

// Splits the integral at z0, where the two mixture components cross, and
// sums the two generalized-binomial series until the terms are negligible.
double LogAFractional(double q, double sigma, double alpha) {
  double log_a0 = kNegInf;
  double log_a1 = kNegInf;
  const double z0 = sigma * sigma * std::log(1.0 / q - 1.0) + 0.5;
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  double coef = 1.0;  // binom(alpha, i), carried by recurrence
  for (int i = 0; i < 100000; ++i) {
    if (i > 0) coef *= (alpha - (i - 1)) / i;
    if (coef == 0.0) break;
    const double log_coef = std::log(std::abs(coef));
    const double j = alpha - i;
    const double log_t0 = log_coef + i * log_q + j * log_1mq;
    const double log_t1 = log_coef + j * log_q + i * log_1mq;
    const double log_e0 =
        std::log(0.5) + LogErfc((i - z0) / (std::numbers::sqrt2 * sigma));
    const double log_e1 =
        std::log(0.5) + LogErfc((z0 - j) / (std::numbers::sqrt2 * sigma));
    const double log_s0 =
        log_t0 + (static_cast<double>(i) * i - i) / (2 * sigma * sigma) +
        log_e0;
    const double log_s1 = log_t1 + (j * j - j) / (2 * sigma * sigma) + log_e1;
    if (coef > 0) {
      log_a0 = LogAdd(log_a0, log_s0);
      log_a1 = LogAdd(log_a1, log_s1);
    } else {
      log_a0 = LogSub(log_a0, log_s0);
      log_a1 = LogSub(log_a1, log_s1);
    }
    if (std::max(log_s0, log_s1) < -30) break;
  }
  return LogAdd(log_a0, log_a1);
}

}  // namespace

PrivacyBudget PrivacyBudget::ForTrainingSize(double epsilon, int64_t n) {
  return {epsilon, 1.0 / (2.0 * static_cast<double>(n))};
}

std::vector<double> DefaultOrders() {
  std::vector<double> orders = {1.25, 1.5};
  for (int k = 11; k <= 100; ++k) orders.push_back(k / 10.0);
  for (int a = 11; a <= 64; ++a) orders.push_back(a);
  orders.push_back(128);
  orders.push_back(256);
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  return orders;
}

absl::StatusOr<double> RdpStep(double q, double sigma, double alpha) {
  if (!(alpha > 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Renyi order must exceed 1, got ", alpha));
  }
  if (!(sigma > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("noise multiplier must be positive, got ", sigma));
  }
  if (!(q > 0.0 && q <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sampling rate must lie in (0, 1], got ", q));
  }
  if (q == 1.0) return alpha / (2.0 * sigma * sigma);
  const double log_a = std::floor(alpha) == alpha
                           ? LogAInteger(q, sigma, static_cast<int>(alpha))
                           : LogAFractional(q, sigma, alpha);
  return log_a / (alpha - 1.0);
}

absl::StatusOr<AccountantState> AccountantState::Create(
    double q, double sigma, std::vector<double> orders) {
  AccountantState state;
  state.q_ = q;
  state.sigma_ = sigma;
  state.orders_ = std::move(orders);
  state.per_step_.reserve(state.orders_.size());
  for (double alpha : state.orders_) {
    absl::StatusOr<double> rdp = RdpStep(q, sigma, alpha);
    if (!rdp.ok()) return rdp.status();
    state.per_step_.push_back(*rdp);
  }
  return state;
}

AccountantState Compose(const AccountantState& state, int64_t steps) {
  AccountantState out = state;
  out.steps_ += std::max<int64_t>(steps, 0);
  return out;
}

absl::StatusOr<EpsilonResult> ToEpsilon(const AccountantState& state,
                                        double delta) {
  if (state.orders().empty()) {
    return absl::FailedPreconditionError("accountant ledger is empty");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1)");
  }
  EpsilonResult best{std::numeric_limits<double>::infinity(), 0.0};
  const double log_inv_delta = std::log(1.0 / delta);
  for (size_t i = 0; i < state.orders().size(); ++i) {
    const double alpha = state.orders()[i];
    const double eps = state.ledger(i) + log_inv_delta / (alpha - 1.0);
    if (eps < best.epsilon) best = {eps, alpha};
  }
  return best;
}

absl::StatusOr<double> CalibrateSigma(const PrivacyBudget& target, double q,
                                      int64_t steps) {
  if (!(target.epsilon > 0.0)) {
    return absl::InvalidArgumentError("target epsilon must be positive");
  }
  auto epsilon_at = [&](double sigma) -> absl::StatusOr<double> {
    absl::StatusOr<AccountantState> state = AccountantState::Create(q, sigma);
    if (!state.ok()) return state.status();
    absl::StatusOr<EpsilonResult> eps =
        ToEpsilon(Compose(*state, steps), target.delta);
    if (!eps.ok()) return eps.status();
    return eps->epsilon;
  };
  absl::StatusOr<double> at_max = epsilon_at(kMaxSigma);
  if (!at_max.ok()) return at_max.status();
  if (*at_max > target.epsilon) {
    return absl::OutOfRangeError(absl::StrCat(
        "privacy budget epsilon=", target.epsilon, " unreachable with sigma <= ",
        kMaxSigma, " (q=", q, ", steps=", steps, ")"));
  }
  absl::StatusOr<double> at_min = epsilon_at(kMinSigma);
  if (!at_min.ok()) return at_min.status();
  if (*at_min <= target.epsilon) return kMinSigma;

  double lo = kMinSigma;
  double hi = kMaxSigma;
  while (hi - lo > kSigmaAccuracy * hi) {
    const double mid = 0.5 * (lo + hi);
    absl::StatusOr<double> eps = epsilon_at(mid);
    if (!eps.ok()) return eps.status();
    if (*eps <= target.epsilon) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace synthbench
