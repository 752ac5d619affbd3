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

#include "synthbench/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "absl/strings/str_cat.h"
#include "synthbench/seeding.h"

namespace synthbench {
namespace {

// Uniform integer in [0, range) by multiply-shift; the bias is below 2^-40
// for every range used here.
uint64_t Bounded(std::mt19937_64& rng, uint64_t range) {
  return static_cast<uint64_t>(
      (static_cast<unsigned __int128>(rng()) * range) >> 64);
}

double Median(std::vector<double> v) {
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + mid);
  return lo + (hi - lo) / 2.0;
}

// Pooled sample reduced to its distinct values and their multiplicities.
struct PooledGroups {
  std::vector<double> values;
  std::vector<int64_t> sizes;
  // Group of every pooled element; real elements first.
  std::vector<int32_t> group_of;
};

PooledGroups GroupPooled(std::span<const double> a, std::span<const double> b) {
  std::vector<std::pair<double, int32_t>> all;
  all.reserve(a.size() + b.size());
  for (double v : a) all.push_back({v, static_cast<int32_t>(all.size())});
  for (double v : b) all.push_back({v, static_cast<int32_t>(all.size())});
  std::sort(all.begin(), all.end());
  PooledGroups g;
  g.group_of.resize(all.size());
  for (size_t k = 0; k < all.size(); ++k) {
    if (k == 0 || all[k].first != all[k - 1].first) {
      g.values.push_back(all[k].first);
      g.sizes.push_back(0);
    }
    g.sizes.back() += 1;
    g.group_of[all[k].second] = static_cast<int32_t>(g.values.size() - 1);
  }
  return g;
}

// Distance between the A part (counts per group) and the rest of the pool.
// Wasserstein integrates |F_A - F_B| over the gaps between distinct values;
// total variation sums |p_A - p_B| / 2 over groups.
double SplitDistance(const PooledGroups& g, std::span<const int64_t> a_counts,
                     int64_t na, int64_t nb, bool total_variation) {
  double sum = 0.0;
  int64_t ca = 0;
  int64_t cb = 0;
  const size_t k_end = g.values.size();
  for (size_t k = 0; k < k_end; ++k) {
    const int64_t in_a = a_counts[k];
    const int64_t in_b = g.sizes[k] - in_a;
    if (total_variation) {
      sum += static_cast<double>(std::llabs(in_a * nb - in_b * na));
      continue;
    }
    ca += in_a;
    cb += in_b;
    if (k + 1 < k_end) {
      sum += static_cast<double>(std::llabs(ca * nb - cb * na)) *
             (g.values[k + 1] - g.values[k]);
    }
  }
  const double scale = static_cast<double>(na) * static_cast<double>(nb);
  return total_variation ? sum / (2.0 * scale) : sum / scale;
}

absl::Status CheckSameSchema(const Dataset& a, const Dataset& b) {
  if (!(a.schema() == b.schema())) {
    return absl::InvalidArgumentError(
        "schema mismatch between real and synthetic data");
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<double> Wasserstein1D(std::span<const double> a,
                                     std::span<const double> b) {
  if (a.empty() || b.empty()) {
    return absl::InvalidArgumentError("wasserstein: empty sample");
  }
  PooledGroups g = GroupPooled(a, b);
  std::vector<int64_t> counts(g.values.size(), 0);
  for (size_t i = 0; i < a.size(); ++i) counts[g.group_of[i]] += 1;
  return SplitDistance(g, counts, static_cast<int64_t>(a.size()),
                       static_cast<int64_t>(b.size()), false);
}

absl::StatusOr<double> TotalVariation(std::span<const double> a,
                                      std::span<const double> b, int levels) {
  if (a.empty() || b.empty()) {
    return absl::InvalidArgumentError("total variation: empty sample");
  }
  std::vector<double> pa(levels, 0.0), pb(levels, 0.0);
  for (double v : a) {
    if (!(v >= 0 && v < levels)) {
      return absl::OutOfRangeError(absl::StrCat("level ", v, " out of range"));
    }
    pa[static_cast<int>(v)] += 1.0 / a.size();
  }
  for (double v : b) {
    if (!(v >= 0 && v < levels)) {
      return absl::OutOfRangeError(absl::StrCat("level ", v, " out of range"));
    }
    pb[static_cast<int>(v)] += 1.0 / b.size();
  }
  double sum = 0.0;
  for (int l = 0; l < levels; ++l) sum += std::abs(pa[l] - pb[l]);
  return sum / 2.0;
}

absl::StatusOr<RatioScore> DistanceRatio(std::span<const double> real,
                                         std::span<const double> synth,
                                         int levels, int iters, uint64_t seed) {
  if (real.empty() || synth.empty()) {
    return absl::InvalidArgumentError("distance ratio: empty sample");
  }
  if (iters < 1) {
    return absl::InvalidArgumentError("distance ratio: iters must be >= 1");
  }
  const bool tv = levels > 0;
  if (tv) {
    absl::StatusOr<double> check = TotalVariation(real, synth, levels);
    if (!check.ok()) return check.status();
  }
  const int64_t na = static_cast<int64_t>(real.size());
  const int64_t nb = static_cast<int64_t>(synth.size());
  const int64_t total = na + nb;
  PooledGroups g = GroupPooled(real, synth);

  std::vector<int64_t> counts(g.values.size(), 0);
  for (int64_t i = 0; i < na; ++i) counts[g.group_of[i]] += 1;
  RatioScore score;
  score.observed = SplitDistance(g, counts, na, nb, tv);

  // Each draw picks the smaller part with a partial Fisher-Yates shuffle of
  // a persistent permutation of the pool.
  const bool pick_a = na <= nb;
  const int64_t picked = pick_a ? na : nb;
  std::vector<int32_t> perm(total);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::vector<double> null(iters);
  for (int t = 0; t < iters; ++t) {
    std::fill(counts.begin(), counts.end(), 0);
    for (int64_t k = 0; k < picked; ++k) {
      const int64_t j = k + static_cast<int64_t>(Bounded(rng, total - k));
      std::swap(perm[k], perm[j]);
      counts[g.group_of[perm[k]]] += 1;
    }
    if (!pick_a) {
      for (size_t k = 0; k < counts.size(); ++k) {
        counts[k] = g.sizes[k] - counts[k];
      }
    }
    null[t] = SplitDistance(g, counts, na, nb, tv);
  }
  score.null_median = Median(std::move(null));
  if (score.null_median > 0.0) {
    score.ratio = score.observed / score.null_median;
  } else if (score.observed == 0.0) {
    score.ratio = 0.0;
  } else {
    return absl::FailedPreconditionError(
        "distance ratio: null median is zero but the observed distance is "
        "not");
  }
  return score;
}

absl::StatusOr<RatioScore> WassersteinRatio(std::span<const double> real,
                                            std::span<const double> synth,
                                            int iters, uint64_t seed) {
  return DistanceRatio(real, synth, 0, iters, seed);
}

absl::StatusOr<WassersteinReport> MarginalReport(const Dataset& real,
                                                 const Dataset& synth,
                                                 int iters, uint64_t seed) {
  if (absl::Status s = CheckSameSchema(real, synth); !s.ok()) return s;
  WassersteinReport report;
  const Schema& schema = real.schema();
  for (int c = 0; c < schema.num_columns(); ++c) {
    const ColumnKind& kind = schema.column(c).kind;
    const bool nominal =
        kind.type == ColumnType::kCategorical && kind.level_count > 2;
    absl::StatusOr<RatioScore> score =
        DistanceRatio(real.column(c), synth.column(c),
                      nominal ? kind.level_count : 0, iters,
                      DeriveSeed(seed, static_cast<uint64_t>(c)));
    if (!score.ok()) {
      return absl::Status(score.status().code(),
                          absl::StrCat("column ", schema.column(c).name, ": ",
                                       score.status().message()));
    }
    report.columns.push_back({schema.column(c).name, nominal, *score});
    report.mean_ratio += score->ratio;
  }
  if (!report.columns.empty()) report.mean_ratio /= report.columns.size();
  return report;
}

namespace {

struct StackedTable {
  std::vector<std::vector<double>> features;
  std::vector<ColumnKind> kinds;
  std::vector<uint8_t> labels;
  double c = 0.0;
};

absl::StatusOr<StackedTable> Stack(const Dataset& real, const Dataset& synth) {
  if (absl::Status s = CheckSameSchema(real, synth); !s.ok()) return s;
  StackedTable t;
  const int64_t nr = real.num_rows();
  const int64_t ns = synth.num_rows();
  for (int c = 0; c < real.num_columns(); ++c) {
    std::vector<double> col(real.column(c).begin(), real.column(c).end());
    col.insert(col.end(), synth.column(c).begin(), synth.column(c).end());
    t.features.push_back(std::move(col));
    t.kinds.push_back(real.schema().column(c).kind);
  }
  t.labels.assign(nr + ns, 0);
  std::fill(t.labels.begin() + nr, t.labels.end(), 1);
  t.c = static_cast<double>(ns) / static_cast<double>(nr + ns);
  return t;
}

double MeanSquaredDeviation(const std::vector<double>& p, double c) {
  double sum = 0.0;
  for (double v : p) sum += (v - c) * (v - c);
  return sum / static_cast<double>(p.size());
}

}  // namespace

absl::StatusOr<PmseReport> Pmse(const Dataset& real, const Dataset& synth,
                                const CartConfig& config) {
  return PmseRatio(real, synth, config, 0, 0);
}

absl::StatusOr<PmseReport> PmseRatio(const Dataset& real, const Dataset& synth,
                                     const CartConfig& config, int null_iters,
                                     uint64_t seed) {
  if (null_iters < 0) {
    return absl::InvalidArgumentError("pmse: null iterations must be >= 0");
  }
  absl::StatusOr<StackedTable> table = Stack(real, synth);
  if (!table.ok()) return table.status();
  const std::vector<uint8_t> labels = table->labels;
  const double c = table->c;
  absl::StatusOr<CartFitter> fitter = CartFitter::Create(
      std::move(table->features), std::move(table->kinds), config);
  if (!fitter.ok()) return fitter.status();

  PmseReport report;
  report.synthetic_fraction = c;
  std::vector<double> fitted;
  if (absl::StatusOr<CartTree> tree = fitter->Fit(labels, &fitted);
      !tree.ok()) {
    return tree.status();
  }
  report.pmse = MeanSquaredDeviation(fitted, c);
  if (null_iters == 0) return report;

  std::vector<double> null(null_iters);
  std::vector<uint8_t> permuted;
  for (int t = 0; t < null_iters; ++t) {
    permuted = labels;
    std::mt19937_64 rng(DeriveSeed(seed, static_cast<uint64_t>(t)));
    for (size_t k = permuted.size() - 1; k > 0; --k) {
      std::swap(permuted[k], permuted[Bounded(rng, k + 1)]);
    }
    absl::StatusOr<CartTree> tree = fitter->Fit(permuted, &fitted);
    if (!tree.ok()) return tree.status();
    null[t] = MeanSquaredDeviation(fitted, c);
  }
  report.null_draws = null_iters;
  report.null_mean =
      std::accumulate(null.begin(), null.end(), 0.0) / null_iters;
  double ss = 0.0;
  for (double v : null) ss += (v - report.null_mean) * (v - report.null_mean);
  report.null_sd = null_iters > 1 ? std::sqrt(ss / (null_iters - 1)) : 0.0;
  report.null_median = Median(null);
  if (report.null_mean > 0.0) {
    report.ratio = report.pmse / report.null_mean;
  } else if (report.pmse == 0.0) {
    report.ratio = 1.0;
  } else {
    return absl::FailedPreconditionError(
        "pmse: null mean is zero but the observed pMSE is not");
  }
  return report;
}

absl::StatusOr<TrainingScores> SpecificTrainingScores(
    const RegressionFit& synth, const RegressionFit& train) {
  if (synth.p != train.p || synth.p == 0) {
    return absl::InvalidArgumentError("regression fits differ in layout");
  }
  TrainingScores s;
  int used = 0;
  for (int j = 0; j < train.p; ++j) {
    s.variance_ratio += synth.covariance(j, j) / train.covariance(j, j);
    const double ref = train.coefficients(j);
    if (std::abs(ref) < kZeroCoefficient) {
      ++s.excluded;
      continue;
    }
    s.percent_bias += 100.0 * std::abs(synth.coefficients(j) - ref) /
                      std::abs(ref);
    ++used;
  }
  if (used == 0) {
    return absl::FailedPreconditionError(
        "every reference coefficient is zero; percent bias undefined");
  }
  s.percent_bias /= used;
  s.variance_ratio /= train.p;
  return s;
}

absl::StatusOr<double> PercentBiasOfMean(
    std::span<const Eigen::VectorXd> estimates, const Eigen::VectorXd& truth) {
  if (estimates.empty()) return absl::InvalidArgumentError("no estimates");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(truth.size());
  for (const Eigen::VectorXd& e : estimates) {
    if (e.size() != truth.size()) {
      return absl::InvalidArgumentError("estimate and truth differ in length");
    }
    mean += e;
  }
  mean /= static_cast<double>(estimates.size());
  double sum = 0.0;
  int used = 0;
  for (int j = 0; j < truth.size(); ++j) {
    if (std::abs(truth(j)) < kZeroCoefficient) continue;
    sum += 100.0 * std::abs(mean(j) - truth(j)) / std::abs(truth(j));
    ++used;
  }
  return used > 0 ? sum / used : 0.0;
}

absl::StatusOr<GeneralisationScores> SpecificGeneralisationScores(
    std::span<const RegressionFit> fits, const Eigen::VectorXd& truth,
    double level) {
  if (fits.empty()) return absl::InvalidArgumentError("no fits to score");
  GeneralisationScores s;
  int64_t pairs = 0;
  std::vector<Eigen::VectorXd> estimates;
  for (const RegressionFit& fit : fits) {
    if (fit.p != truth.size()) {
      return absl::InvalidArgumentError("fit and truth differ in length");
    }
    estimates.push_back(fit.coefficients);
    std::vector<Interval> ci = ConfidenceIntervals(fit, level);
    for (int j = 0; j < fit.p; ++j) {
      ++pairs;
      if (ci[j].lo <= truth(j) && truth(j) <= ci[j].hi) s.coverage += 1.0;
      s.mean_width += ci[j].hi - ci[j].lo;
    }
  }
  for (int j = 0; j < truth.size(); ++j) {
    if (std::abs(truth(j)) < kZeroCoefficient) ++s.excluded;
  }
  s.coverage /= static_cast<double>(pairs);
  s.mean_width /= static_cast<double>(pairs);
  absl::StatusOr<double> bias = PercentBiasOfMean(estimates, truth);
  if (!bias.ok()) return bias.status();
  s.percent_bias = *bias;
  return s;
}

absl::StatusOr<double> PredictionRmse(const RegressionFit& fit,
                                      const Dataset& test,
                                      const LinearFormula& formula) {
  if (test.num_rows() == 0) return absl::InvalidArgumentError("empty test set");
  if (formula.num_coefficients() != fit.p) {
    return absl::InvalidArgumentError("formula does not match the fit");
  }
  const Eigen::MatrixXd x = DesignMatrix(test, formula);
  const Eigen::VectorXd pred = x * fit.coefficients;
  std::span<const double> y = test.column(formula.outcome);
  double ss = 0.0;
  for (int64_t i = 0; i < test.num_rows(); ++i) {
    ss += (pred(i) - y[i]) * (pred(i) - y[i]);
  }
  return std::sqrt(ss / static_cast<double>(test.num_rows()));
}

double StructuralZeroRate(const Dataset& data) {
  if (data.num_rows() == 0) return 0.0;
  int64_t bad = 0;
  for (int64_t i = 0; i < data.num_rows(); ++i) {
    for (const StructuralZeroRule& r : data.schema().zero_rules()) {
      if (data.at(i, r.guard_column) == r.guard_level &&
          data.at(i, r.forced_column) != r.forced_level) {
        ++bad;
        break;
      }
    }
  }
  return static_cast<double>(bad) / static_cast<double>(data.num_rows());
}

}  // namespace synthbench
