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

// Quality measures for a synthetic release.
//
// General measures compare distributions: per-column Wasserstein (or total
// variation for nominal columns) against a randomization null, and the
// propensity-score MSE of a CART discriminator against a label-permutation
// null. Specific measures compare OLS fits of the analysis model.

#ifndef SYNTHBENCH_METRICS_H_
#define SYNTHBENCH_METRICS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "synthbench/dgp.h"
#include "synthbench/tabular.h"

namespace synthbench {

// ---------------------------------------------------------------------------
// Marginal distances

// 1-Wasserstein distance between two empirical distributions.
absl::StatusOr<double> Wasserstein1D(std::span<const double> a,
                                     std::span<const double> b);

// Total variation between the level frequencies of two samples of level
// indices in [0, levels).
absl::StatusOr<double> TotalVariation(std::span<const double> a,
                                      std::span<const double> b, int levels);

struct RatioScore {
  double observed = 0.0;
  double null_median = 0.0;
  double ratio = 0.0;
};

inline constexpr int kDefaultWassersteinNullIters = 10000;

// Observed distance over the median distance of `iters` random splits of
// the pooled sample into parts of the original sizes. `levels` > 0 selects
// total variation over that many levels instead of Wasserstein.
absl::StatusOr<RatioScore> DistanceRatio(std::span<const double> real,
                                         std::span<const double> synth,
                                         int levels, int iters, uint64_t seed);

absl::StatusOr<RatioScore> WassersteinRatio(std::span<const double> real,
                                            std::span<const double> synth,
                                            int iters, uint64_t seed);

struct ColumnDistance {
  std::string column;
  bool total_variation = false;
  RatioScore score;
};

struct WassersteinReport {
  std::vector<ColumnDistance> columns;
  double mean_ratio = 0.0;
};

// Nominal columns with more than two levels use total variation; every other
// column uses Wasserstein on its raw values. Column c's null loop is seeded
// with DeriveSeed(seed, c).
absl::StatusOr<WassersteinReport> MarginalReport(const Dataset& real,
                                                 const Dataset& synth,
                                                 int iters, uint64_t seed);

// ---------------------------------------------------------------------------
// CART

struct CartConfig {
  int max_depth = 10;
  int min_leaf = 20;
  // A split must reduce the total Gini impurity (count-weighted) by more than
  // zero and by at least complexity * root impurity. Off by default: with
  // pruning the permutation-null trees rarely split and the null mean is 0.
  double complexity = 0.0;
};

struct CartNode {
  // -1 for a leaf.
  int feature = -1;
  // Continuous split: value <= threshold goes left.
  double threshold = 0.0;
  // Categorical split: levels whose bit is set go left.
  uint64_t left_levels = 0;
  int left = -1;
  int right = -1;
  double probability = 0.0;
  int64_t count = 0;
};

struct CartTree {
  std::vector<CartNode> nodes;
  std::vector<ColumnKind> features;

  double Predict(std::span<const double> row) const;
  int depth() const;
  int num_leaves() const;
};

// Presorts a feature table once so trees for many label vectors (the
// permutation null) can be grown cheaply. Features are columns.
class CartFitter {
 public:
  static absl::StatusOr<CartFitter> Create(
      std::vector<std::vector<double>> features,
      std::vector<ColumnKind> kinds, CartConfig config);

  int64_t num_rows() const { return num_rows_; }

  // Grows a tree; when `fitted` is non-null it receives the leaf probability
  // of every training row.
  absl::StatusOr<CartTree> Fit(std::span<const uint8_t> labels,
                               std::vector<double>* fitted = nullptr) const;

 private:
  CartFitter() = default;

  std::vector<std::vector<double>> features_;
  std::vector<ColumnKind> kinds_;
  // Row indices by ascending value, for ordered features.
  std::vector<std::vector<int32_t>> order_;
  CartConfig config_;
  int64_t num_rows_ = 0;
};

absl::StatusOr<CartTree> CartFit(std::vector<std::vector<double>> features,
                                 std::vector<ColumnKind> kinds,
                                 std::span<const uint8_t> labels,
                                 const CartConfig& config);

// ---------------------------------------------------------------------------
// pMSE

struct PmseReport {
  double pmse = 0.0;
  double synthetic_fraction = 0.0;
  double null_mean = 0.0;
  double null_median = 0.0;
  double null_sd = 0.0;
  int null_draws = 0;
  double ratio = 0.0;
};

inline constexpr int kDefaultPmseNullIters = 100;

// Observed pMSE only (no null).
absl::StatusOr<PmseReport> Pmse(const Dataset& real, const Dataset& synth,
                                const CartConfig& config);

// Observed pMSE over the mean pMSE of `null_iters` label permutations. If the
// null mean and the observed value are both zero the ratio is 1.
absl::StatusOr<PmseReport> PmseRatio(const Dataset& real, const Dataset& synth,
                                     const CartConfig& config, int null_iters,
                                     uint64_t seed);

// ---------------------------------------------------------------------------
// Analysis model

struct RegressionFit {
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd covariance;
  double residual_variance = 0.0;
  int64_t n = 0;
  int p = 0;
  std::vector<std::string> names;
};

Eigen::MatrixXd DesignMatrix(const Dataset& data, const LinearFormula& formula);

// Fails with the name of the first column that is linearly dependent on the
// preceding ones.
absl::StatusOr<RegressionFit> OlsFit(const Dataset& data,
                                     const LinearFormula& formula);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Student-t intervals with n - p degrees of freedom.
std::vector<Interval> ConfidenceIntervals(const RegressionFit& fit,
                                          double level);

struct TrainingScores {
  double percent_bias = 0.0;
  double variance_ratio = 0.0;
  // Coefficients left out of the bias mean because the reference is ~0.
  int excluded = 0;
};

inline constexpr double kZeroCoefficient = 1e-12;

absl::StatusOr<TrainingScores> SpecificTrainingScores(
    const RegressionFit& synth, const RegressionFit& train);

// Percent bias of the mean estimate: 100 |mean_k est_kj - truth_j| / |truth_j|
// averaged over the coefficients whose truth is not ~0. With one estimate
// this is the mean absolute percent error of that estimate.
absl::StatusOr<double> PercentBiasOfMean(
    std::span<const Eigen::VectorXd> estimates, const Eigen::VectorXd& truth);

struct GeneralisationScores {
  double percent_bias = 0.0;
  double coverage = 0.0;
  double mean_width = 0.0;
  int excluded = 0;
};

absl::StatusOr<GeneralisationScores> SpecificGeneralisationScores(
    std::span<const RegressionFit> fits, const Eigen::VectorXd& truth,
    double level = 0.9);

absl::StatusOr<double> PredictionRmse(const RegressionFit& fit,
                                      const Dataset& test,
                                      const LinearFormula& formula);

// Fraction of rows breaking at least one structural-zero rule.
double StructuralZeroRate(const Dataset& data);

}  // namespace synthbench

#endif  // SYNTHBENCH_METRICS_H_
