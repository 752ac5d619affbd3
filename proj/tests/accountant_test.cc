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
#include <vector>

#include "gtest/gtest.h"
#include "oracles/oracles.h"
#include "synthbench/accountant.h"
#include "test_util.h"

namespace synthbench {
namespace {

TEST(RdpStepTest, FullBatchClosedForm) {
  ASSERT_OK_AND_ASSIGN(double rdp, RdpStep(1.0, 1.0, 2.0));
  EXPECT_EQ(rdp, 1.0);
  for (double sigma : {0.5, 1.3, 4.0}) {
    for (double alpha : {1.5, 2.0, 7.25, 64.0}) {
      ASSERT_OK_AND_ASSIGN(rdp, RdpStep(1.0, sigma, alpha));
      EXPECT_NEAR(rdp, alpha / (2 * sigma * sigma), 1e-10);
    }
  }
}

TEST(RdpStepTest, MatchesQuadratureAtOrder32) {
  ASSERT_OK_AND_ASSIGN(double rdp, RdpStep(0.01, 1.1, 32.0));
  const double oracle = oracle::RdpByQuadrature(0.01, 1.1, 32.0);
  // Four significant digits.
  EXPECT_NEAR(rdp / oracle, 1.0, 5e-4) << rdp << " vs " << oracle;
}

TEST(RdpStepTest, MatchesQuadratureAcrossOrders) {
  for (double q : {0.001, 0.01, 0.1, 0.5}) {
    for (double sigma : {0.7, 1.1, 2.2, 5.0}) {
      for (double alpha : {1.25, 1.5, 2.0, 2.7, 3.0, 8.5, 21.0, 64.0}) {
        ASSERT_OK_AND_ASSIGN(double rdp, RdpStep(q, sigma, alpha));
        const double oracle = oracle::RdpByQuadrature(q, sigma, alpha);
        EXPECT_NEAR(rdp, oracle, 1e-6 * std::abs(oracle) + 1e-13)
            << "q=" << q << " sigma=" << sigma << " alpha=" << alpha;
      }
    }
  }
}

TEST(RdpStepTest, RejectsBadArguments) {
  EXPECT_FALSE(RdpStep(0.01, 1.0, 1.0).ok());
  EXPECT_FALSE(RdpStep(0.01, 0.0, 2.0).ok());
  EXPECT_FALSE(RdpStep(0.0, 1.0, 2.0).ok());
  EXPECT_FALSE(RdpStep(1.5, 1.0, 2.0).ok());
}

TEST(RdpStepTest, IncreasesWithSamplingRate) {
  double previous = 0.0;
  for (double q : {0.001, 0.01, 0.05, 0.2, 1.0}) {
    ASSERT_OK_AND_ASSIGN(double rdp, RdpStep(q, 1.5, 10.0));
    EXPECT_GT(rdp, previous);
    previous = rdp;
  }
}

TEST(ComposeTest, ZeroStepsIsIdentity) {
  ASSERT_OK_AND_ASSIGN(AccountantState s, AccountantState::Create(0.01, 1.1));
  const AccountantState once = Compose(s, 7);
  EXPECT_EQ(Compose(once, 0), once);
  EXPECT_EQ(Compose(s, 0), s);
}

TEST(ComposeTest, LedgerIsPerStepTimesSteps) {
  ASSERT_OK_AND_ASSIGN(AccountantState s, AccountantState::Create(0.01, 1.1));
  AccountantState run = s;
  for (int t = 0; t < 2000; ++t) run = Compose(run, 1);
  EXPECT_EQ(run.steps(), 2000);
  EXPECT_EQ(run, Compose(s, 2000));
  for (size_t i = 0; i < run.orders().size(); ++i) {
    ASSERT_OK_AND_ASSIGN(double per_step,
                         RdpStep(0.01, 1.1, run.orders()[i]));
    EXPECT_DOUBLE_EQ(run.ledger(i), 2000 * per_step);
  }
}

TEST(ToEpsilonTest, SingleOrder) {
  ASSERT_OK_AND_ASSIGN(AccountantState s,
                       AccountantState::Create(1.0, 1.0, {2.0}));
  ASSERT_OK_AND_ASSIGN(EpsilonResult e, ToEpsilon(Compose(s, 1), std::exp(-1.0)));
  EXPECT_DOUBLE_EQ(e.epsilon, 2.0);
  EXPECT_EQ(e.order, 2.0);
}

TEST(ToEpsilonTest, Errors) {
  ASSERT_OK_AND_ASSIGN(AccountantState empty,
                       AccountantState::Create(0.5, 1.0, {}));
  EXPECT_EQ(ToEpsilon(empty, 1e-5).status().code(),
            absl::StatusCode::kFailedPrecondition);
  ASSERT_OK_AND_ASSIGN(AccountantState s, AccountantState::Create(0.5, 1.0));
  EXPECT_FALSE(ToEpsilon(s, 0.0).ok());
  EXPECT_FALSE(ToEpsilon(s, 1.0).ok());
}

TEST(DefaultOrdersTest, Layout) {
  const std::vector<double> orders = DefaultOrders();
  EXPECT_EQ(orders.front(), 1.1);
  EXPECT_EQ(orders.back(), 256.0);
  EXPECT_TRUE(std::is_sorted(orders.begin(), orders.end()));
  EXPECT_NE(std::find(orders.begin(), orders.end(), 1.25), orders.end());
  EXPECT_NE(std::find(orders.begin(), orders.end(), 128.0), orders.end());
}

TEST(CalibrateSigmaTest, ReplayMeetsTarget) {
  const PrivacyBudget target{1.0, 5e-5};
  ASSERT_OK_AND_ASSIGN(double sigma, CalibrateSigma(target, 0.01, 2000));
  ASSERT_OK_AND_ASSIGN(AccountantState s, AccountantState::Create(0.01, sigma));
  ASSERT_OK_AND_ASSIGN(EpsilonResult e, ToEpsilon(Compose(s, 2000), 5e-5));
  EXPECT_LE(e.epsilon, 1.0);
  EXPECT_NEAR(e.epsilon, 1.0, 0.01);
}

TEST(CalibrateSigmaTest, MonotoneInEpsilon) {
  double previous = 1e300;
  for (double eps : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    ASSERT_OK_AND_ASSIGN(double sigma,
                         CalibrateSigma({eps, 5e-5}, 0.01, 2000));
    EXPECT_LT(sigma, previous) << "epsilon " << eps;
    previous = sigma;
  }
}

TEST(CalibrateSigmaTest, UnreachableBudget) {
  const absl::StatusOr<double> sigma =
      CalibrateSigma({1e-6, 1e-5}, 1.0, 100000);
  EXPECT_EQ(sigma.status().code(), absl::StatusCode::kOutOfRange);
  EXPECT_FALSE(CalibrateSigma({0.0, 1e-5}, 0.01, 10).ok());
}

TEST(CalibrateSigmaTest, EpsilonAgreesWithQuadratureOracle) {
  ASSERT_OK_AND_ASSIGN(double sigma, CalibrateSigma({1.0, 5e-5}, 0.01, 2000));
  const double eps = oracle::EpsilonByQuadrature(0.01, sigma, 2000, 5e-5,
                                                 DefaultOrders());
  EXPECT_NEAR(eps, 1.0, 0.01) << "sigma " << sigma;
}

TEST(CalibrateSigmaTest, SigmaAgreesWithOracleBisection) {
  ASSERT_OK_AND_ASSIGN(double sigma, CalibrateSigma({1.0, 5e-5}, 0.01, 2000));
  // Independent bisection on the quadrature epsilon.
  const std::vector<double> orders = DefaultOrders();
  double lo = 0.5;
  double hi = 10.0;
  for (int it = 0; it < 20; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (oracle::EpsilonByQuadrature(0.01, mid, 2000, 5e-5, orders) <= 1.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  // Three significant digits for sigma in [1, 10).
  EXPECT_NEAR(sigma, hi, 0.005) << sigma << " vs oracle " << hi;
}

TEST(PrivacyBudgetTest, DeltaIsHalfInverseSize) {
  EXPECT_DOUBLE_EQ(PrivacyBudget::ForTrainingSize(1.0, 10000).delta, 5e-5);
  EXPECT_EQ(PrivacyBudget::ForTrainingSize(0.1, 500).epsilon, 0.1);
}

}  // namespace
}  // namespace synthbench
