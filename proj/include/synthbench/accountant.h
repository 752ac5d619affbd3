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

// Renyi differential privacy accounting for the sampled Gaussian mechanism.
//
// One step samples each record with probability q and adds N(0, sigma^2)
// noise to a sum of sensitivity-1 contributions. Its RDP of order alpha is
//
//   log(E_{z ~ N(0, sigma^2)}[((1 - q) + q exp((2z - 1) / (2 sigma^2)))^alpha])
//   / (alpha - 1)
//
// evaluated by a binomial series for integer alpha and by the two-sided erfc
// series for fractional alpha, both in the log domain.

#ifndef SYNTHBENCH_ACCOUNTANT_H_
#define SYNTHBENCH_ACCOUNTANT_H_

#include <cstdint>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace synthbench {

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 1e-5;

  // delta = 1 / (2 N).
  static PrivacyBudget ForTrainingSize(double epsilon, int64_t n);
};

// {1.1, 1.2, ..., 10} u {1.25, 1.5} u {11, ..., 64} u {128, 256}, sorted.
std::vector<double> DefaultOrders();

absl::StatusOr<double> RdpStep(double q, double sigma, double alpha);

// Value object. The ledger entry for order alpha is steps * RdpStep(alpha);
// it is computed from the per-step value on demand so composition is exactly
// linear in the step count.
class AccountantState {
 public:
  static absl::StatusOr<AccountantState> Create(
      double q, double sigma, std::vector<double> orders = DefaultOrders());

  double sampling_rate() const { return q_; }
  double noise_multiplier() const { return sigma_; }
  int64_t steps() const { return steps_; }
  const std::vector<double>& orders() const { return orders_; }
  const std::vector<double>& per_step() const { return per_step_; }
  double ledger(size_t order_index) const {
    return static_cast<double>(steps_) * per_step_[order_index];
  }

  bool operator==(const AccountantState&) const = default;

 private:
  friend AccountantState Compose(const AccountantState& state, int64_t steps);
  AccountantState() = default;

  double q_ = 1.0;
  double sigma_ = 1.0;
  int64_t steps_ = 0;
  std::vector<double> orders_;
  std::vector<double> per_step_;
};

AccountantState Compose(const AccountantState& state, int64_t steps);

struct EpsilonResult {
  double epsilon = 0.0;
  double order = 0.0;
};

// min over orders of ledger[alpha] + log(1/delta) / (alpha - 1).
absl::StatusOr<EpsilonResult> ToEpsilon(const AccountantState& state,
                                        double delta);

inline constexpr double kMinSigma = 0.3;
inline constexpr double kMaxSigma = 100.0;

// Smallest sigma in [kMinSigma, kMaxSigma] (bisection, relative tolerance
// 1e-3) whose epsilon after `steps` steps is <= target.epsilon.
absl::StatusOr<double> CalibrateSigma(const PrivacyBudget& target, double q,
                                      int64_t steps);

}  // namespace synthbench

#endif  // SYNTHBENCH_ACCOUNTANT_H_
