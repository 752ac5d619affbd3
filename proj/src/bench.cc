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

#include "synthbench/bench.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "synthbench/inference.h"
#include "synthbench/seeding.h"

namespace synthbench {
namespace {

using nlohmann::json;

constexpr int kScoresFormatVersion = 1;
constexpr double kMaxFailureFraction = 0.10;

// Shortest representation that round-trips.
std::string Num(double v) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, end);
}

// One (training set, fit) unit: fits once and scores its n releases.
struct FitTask {
  int l = 0;
  int m = 0;
};

struct TaskOutput {
  std::vector<CellResult> cells;
  // Successful release fits, for the combined-interval diagnostic.
  std::vector<RegressionFit> fits;
};

struct SharedData {
  const BenchPlan* plan = nullptr;
  const SubPlan* sub = nullptr;
  Scenario1Params params;
  LinearFormula formula;
  TrueParams truth;
};

absl::Status ScoreRelease(const SharedData& shared, const Dataset& train,
                          const RegressionFit& train_fit, const Dataset& test,
                          const Dataset& release, uint64_t cell_seed,
                          CellResult& cell, RegressionFit& release_fit) {
  const BenchPlan& plan = *shared.plan;
  const uint64_t w_seed = SeedFor(cell_seed, 0, 0, 0, StreamTag::kWassersteinNull);
  const uint64_t p_seed = SeedFor(cell_seed, 0, 0, 0, StreamTag::kPmseNull);
  NineScores& s = cell.scores;

  absl::StatusOr<WassersteinReport> w_train = MarginalReport(
      train, release, plan.wasserstein_null_iters, DeriveSeed(w_seed, 0));
  if (!w_train.ok()) return w_train.status();
  absl::StatusOr<WassersteinReport> w_test = MarginalReport(
      test, release, plan.wasserstein_null_iters, DeriveSeed(w_seed, 1));
  if (!w_test.ok()) return w_test.status();
  absl::StatusOr<PmseReport> p_train = PmseRatio(
      train, release, plan.cart, plan.pmse_null_iters, DeriveSeed(p_seed, 0));
  if (!p_train.ok()) return p_train.status();
  absl::StatusOr<PmseReport> p_test = PmseRatio(
      test, release, plan.cart, plan.pmse_null_iters, DeriveSeed(p_seed, 1));
  if (!p_test.ok()) return p_test.status();

  absl::StatusOr<RegressionFit> fit = OlsFit(release, shared.formula);
  if (!fit.ok()) return fit.status();
  absl::StatusOr<TrainingScores> specific = SpecificTrainingScores(*fit, train_fit);
  if (!specific.ok()) return specific.status();
  absl::StatusOr<GeneralisationScores> general = SpecificGeneralisationScores(
      std::span<const RegressionFit>(&*fit, 1), shared.truth.coefficients,
      plan.coverage_level);
  if (!general.ok()) return general.status();
  absl::StatusOr<double> rmse = PredictionRmse(*fit, test, shared.formula);
  if (!rmse.ok()) return rmse.status();

  s.training_wasserstein = w_train->mean_ratio;
  s.training_pmse = p_train->ratio;
  s.generalisation_wasserstein = w_test->mean_ratio;
  s.generalisation_pmse = p_test->ratio;
  s.generalisation_coverage = general->coverage;
  s.generalisation_bias = general->percent_bias;
  s.generalisation_rmse = *rmse;
  s.training_covariance_ratio = specific->variance_ratio;
  s.training_bias = specific->percent_bias;
  release_fit = std::move(*fit);
  return absl::OkStatus();
}

TaskOutput RunTask(const SharedData& shared, const FitTask& task) {
  const BenchPlan& plan = *shared.plan;
  const SubPlan& sub = *shared.sub;
  TaskOutput out;
  out.cells.resize(plan.n);
  for (int k = 0; k < plan.n; ++k) {
    out.cells[k].l = task.l;
    out.cells[k].m = task.m;
    out.cells[k].n = k;
  }
  auto fail_all = [&](const absl::Status& status) {
    for (CellResult& c : out.cells) {
      c.ok = false;
      c.error = std::string(status.message());
    }
    return out;
  };

  absl::StatusOr<Dataset> train = GenerateScenario1(
      sub.n_train, SeedFor(sub.seed, task.l, 0, 0, StreamTag::kTrainData),
      shared.params);
  if (!train.ok()) return fail_all(train.status());
  absl::StatusOr<Dataset> test = GenerateScenario1(
      sub.n_train, SeedFor(sub.seed, task.l, 0, 0, StreamTag::kTestData),
      shared.params);
  if (!test.ok()) return fail_all(test.status());
  absl::StatusOr<RegressionFit> train_fit = OlsFit(*train, shared.formula);
  if (!train_fit.ok()) return fail_all(train_fit.status());

  SynthesizerSpec spec = plan.synthesizer;
  spec.budget = sub.budget;
  spec.seed = SeedFor(sub.seed, task.l, task.m, 0, StreamTag::kFit);
  const auto fit_start = std::chrono::steady_clock::now();
  absl::StatusOr<SynthesizerModel> model = Fit(spec, *train);
  if (!model.ok()) return fail_all(model.status());
  const double fit_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    fit_start)
          .count();
  const double realized = model->realized ? model->realized->epsilon : 0.0;

  for (int k = 0; k < plan.n; ++k) {
    CellResult& cell = out.cells[k];
    const auto start = std::chrono::steady_clock::now();
    cell.realized_epsilon = realized;
    const uint64_t cell_seed = SeedFor(sub.seed, task.l, task.m, k,
                                       StreamTag::kSample);
    absl::StatusOr<Dataset> raw = SampleRaw(*model, sub.n_train, cell_seed);
    if (!raw.ok()) {
      cell.error = std::string(raw.status().message());
      continue;
    }
    cell.raw_zero_rate = StructuralZeroRate(*raw);
    const Dataset release = EnforceStructuralZeros(*raw);
    cell.violations = static_cast<int64_t>(Validate(release).size());
    RegressionFit release_fit;
    absl::Status s = ScoreRelease(shared, *train, *train_fit, *test, release,
                                  cell_seed, cell, release_fit);
    cell.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count() +
                   (k == 0 ? fit_seconds : 0.0);
    if (!s.ok()) {
      cell.error = std::string(s.message());
      continue;
    }
    if (cell.violations != 0) {
      cell.error = absl::StrCat(cell.violations, " validation failures");
      continue;
    }
    cell.ok = true;
    out.fits.push_back(std::move(release_fit));
  }
  return out;
}

NineScores MeanScores(const std::vector<const CellResult*>& cells) {
  std::array<double, kNumScores> sum{};
  for (const CellResult* c : cells) {
    const std::array<double, kNumScores> v = c->scores.AsArray();
    for (int k = 0; k < kNumScores; ++k) sum[k] += v[k];
  }
  if (!cells.empty()) {
    for (double& v : sum) v /= static_cast<double>(cells.size());
  }
  return NineScores::FromArray(sum);
}

json ScoresToJson(const NineScores& s) {
  json j = json::object();
  const std::array<double, kNumScores> v = s.AsArray();
  for (int k = 0; k < kNumScores; ++k) {
    j[std::string(NineScores::Keys()[k])] = v[k];
  }
  return j;
}

}  // namespace

std::array<double, kNumScores> NineScores::AsArray() const {
  return {training_wasserstein,       training_pmse,
          generalisation_wasserstein, generalisation_pmse,
          generalisation_coverage,    generalisation_bias,
          generalisation_rmse,        training_covariance_ratio,
          training_bias};
}

NineScores NineScores::FromArray(const std::array<double, kNumScores>& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]};
}

const std::array<std::string_view, kNumScores>& NineScores::Keys() {
  static const std::array<std::string_view, kNumScores> kKeys = {
      "training_wasserstein_ratio",      "training_pmse_ratio",
      "generalisation_wasserstein_ratio", "generalisation_pmse_ratio",
      "generalisation_coverage",          "generalisation_coef_bias",
      "generalisation_prediction_rmse",   "training_covariance_ratio",
      "training_coef_bias"};
  return kKeys;
}

const std::array<std::string_view, kNumScores>& NineScores::Labels() {
  static const std::array<std::string_view, kNumScores> kLabels = {
      "Training Wasserstein",      "Training pMSE",
      "Generalisation Wasserstein", "Generalisation pMSE",
      "Generalisation Coverage",    "Generalisation Coef Bias",
      "Generalisation RMSE",        "Training Covariance Ratio",
      "Training Coef Bias"};
  return kLabels;
}

std::vector<SubPlan> DisciplinesGrid(const BenchPlan& plan) {
  std::vector<SubPlan> grid;
  const uint64_t master = plan.seed.value_or(0);
  for (size_t i = 0; i < plan.n_train.size(); ++i) {
    for (size_t j = 0; j < plan.epsilon.size(); ++j) {
      SubPlan s;
      s.index = static_cast<int>(grid.size());
      s.n_train = plan.n_train[i];
      s.epsilon = plan.epsilon[j];
      s.budget = PrivacyBudget::ForTrainingSize(s.epsilon, s.n_train);
      s.seed = SeedFor(master, i, j, 0, StreamTag::kSubPlan);
      grid.push_back(s);
    }
  }
  return grid;
}

absl::StatusOr<BenchResult> RunPlan(const BenchPlan& plan) {
  if (absl::Status s = plan.Check(); !s.ok()) return s;
  if (!plan.seed.has_value()) {
    return absl::InvalidArgumentError("a master seed is required");
  }
  BenchResult result;
  result.plan = plan;
  SharedData shared;
  shared.plan = &result.plan;
  shared.params = Scenario1Params::ForConvention(plan.normal_parameter);
  shared.formula = Scenario1Formula();
  shared.truth = Scenario1TrueParams(shared.params);
  result.rmse_floor = shared.truth.noise_sd;

  for (const SubPlan& sub : DisciplinesGrid(plan)) {
    shared.sub = &sub;
    std::vector<FitTask> tasks;
    for (int l = 0; l < plan.l; ++l) {
      for (int m = 0; m < plan.m; ++m) tasks.push_back({l, m});
    }
    std::vector<TaskOutput> outputs(tasks.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      for (size_t t = next++; t < tasks.size(); t = next++) {
        outputs[t] = RunTask(shared, tasks[t]);
      }
    };
    const int workers =
        std::min<int>(plan.workers, static_cast<int>(tasks.size()));
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    SubPlanResult r;
    r.sub_plan = sub;
    std::vector<const CellResult*> good;
    r.min_realized_epsilon = std::numeric_limits<double>::infinity();
    r.max_realized_epsilon = -std::numeric_limits<double>::infinity();
    for (const TaskOutput& o : outputs) {
      for (const CellResult& c : o.cells) {
        r.cells.push_back(c);
        std::fprintf(stderr,
                     "n_train=%lld eps=%g cell (%d,%d,%d): %s realized_eps=%.4f "
                     "%.2fs%s%s\n",
                     static_cast<long long>(sub.n_train), sub.epsilon, c.l,
                     c.m, c.n, c.ok ? "ok" : "FAILED", c.realized_epsilon,
                     c.seconds, c.ok ? "" : " ", c.error.c_str());
      }
    }
    for (const CellResult& c : r.cells) {
      if (!c.ok) {
        ++r.failures;
        continue;
      }
      good.push_back(&c);
      r.min_realized_epsilon = std::min(r.min_realized_epsilon, c.realized_epsilon);
      r.max_realized_epsilon = std::max(r.max_realized_epsilon, c.realized_epsilon);
    }
    if (r.failures >
        kMaxFailureFraction * static_cast<double>(r.cells.size())) {
      std::string first;
      for (const CellResult& c : r.cells) {
        if (!c.ok) {
          first = c.error;
          break;
        }
      }
      return absl::AbortedError(absl::StrCat(
          r.failures, " of ", r.cells.size(),
          " cells failed (limit 10%) for n_train=", sub.n_train,
          " epsilon=", sub.epsilon, "; first error: ", first));
    }
    if (good.empty()) {
      r.min_realized_epsilon = r.max_realized_epsilon = 0.0;
    }
    r.scores = MeanScores(good);

    // Hierarchical mean: per fit, then per training set, then overall.
    std::array<double, kNumScores> top{};
    int top_count = 0;
    for (int l = 0; l < plan.l; ++l) {
      std::array<double, kNumScores> mid{};
      int mid_count = 0;
      for (int m = 0; m < plan.m; ++m) {
        std::vector<const CellResult*> fit_cells;
        for (const CellResult* c : good) {
          if (c->l == l && c->m == m) fit_cells.push_back(c);
        }
        if (fit_cells.empty()) continue;
        const std::array<double, kNumScores> v =
            MeanScores(fit_cells).AsArray();
        for (int k = 0; k < kNumScores; ++k) mid[k] += v[k];
        ++mid_count;
      }
      if (mid_count == 0) continue;
      for (int k = 0; k < kNumScores; ++k) top[k] += mid[k] / mid_count;
      ++top_count;
    }
    if (top_count > 0) {
      for (double& v : top) v /= top_count;
    }
    r.hierarchical = NineScores::FromArray(top);

    // Generalisation bias is the bias of the average estimate over all
    // releases, not the average per-release error.
    std::vector<Eigen::VectorXd> flat_estimates;
    std::vector<Eigen::VectorXd> l_means;
    for (int l = 0; l < plan.l; ++l) {
      Eigen::VectorXd l_sum = Eigen::VectorXd::Zero(shared.truth.coefficients.size());
      int fits = 0;
      for (size_t t = 0; t < tasks.size(); ++t) {
        if (tasks[t].l != l || outputs[t].fits.empty()) continue;
        Eigen::VectorXd fit_sum = Eigen::VectorXd::Zero(l_sum.size());
        for (const RegressionFit& f : outputs[t].fits) {
          flat_estimates.push_back(f.coefficients);
          fit_sum += f.coefficients;
        }
        l_sum += fit_sum / static_cast<double>(outputs[t].fits.size());
        ++fits;
      }
      if (fits > 0) l_means.push_back(l_sum / fits);
    }
    if (!flat_estimates.empty()) {
      r.scores.generalisation_bias =
          *PercentBiasOfMean(flat_estimates, shared.truth.coefficients);
      r.hierarchical.generalisation_bias =
          *PercentBiasOfMean(l_means, shared.truth.coefficients);
    }

    // Combined intervals across the releases of each fit.
    if (plan.n >= 2) {
      RubinDiagnostic d;
      int64_t pairs = 0;
      for (const TaskOutput& o : outputs) {
        if (o.fits.size() < 2) continue;
        std::vector<PointEstimate> estimates;
        for (const RegressionFit& f : o.fits) estimates.push_back(EstimateOf(f));
        absl::StatusOr<CombinedEstimate> ce = Combine(estimates);
        if (!ce.ok()) continue;
        absl::StatusOr<CombinedInterval> ci =
            CombinedIntervals(*ce, plan.coverage_level);
        if (!ci.ok()) continue;
        ++d.combined;
        for (size_t j = 0; j < ci->standard.size(); ++j) {
          const double t = shared.truth.coefficients(j);
          d.coverage += ci->standard[j].lo <= t && t <= ci->standard[j].hi;
          d.uncongenial_coverage +=
              ci->uncongenial[j].lo <= t && t <= ci->uncongenial[j].hi;
          ++pairs;
        }
      }
      if (pairs > 0) {
        d.coverage /= static_cast<double>(pairs);
        d.uncongenial_coverage /= static_cast<double>(pairs);
        r.rubin = d;
      }
    }
    result.sub_plans.push_back(std::move(r));
  }
  return result;
}

std::string FormatCellsCsv(const BenchResult& result) {
  std::string out = "n_train,epsilon,l,m,n,metric,value\n";
  for (const SubPlanResult& r : result.sub_plans) {
    for (const CellResult& c : r.cells) {
      const std::string prefix =
          absl::StrCat(r.sub_plan.n_train, ",", Num(r.sub_plan.epsilon), ",",
                       c.l, ",", c.m, ",", c.n, ",");
      if (!c.ok) {
        absl::StrAppend(&out, prefix, "failed,1\n");
        continue;
      }
      const std::array<double, kNumScores> v = c.scores.AsArray();
      for (int k = 0; k < kNumScores; ++k) {
        absl::StrAppend(&out, prefix, std::string(NineScores::Keys()[k]), ",",
                        Num(v[k]), "\n");
      }
      absl::StrAppend(&out, prefix, "realized_epsilon,",
                      Num(c.realized_epsilon), "\n");
      absl::StrAppend(&out, prefix, "raw_structural_zero_rate,",
                      Num(c.raw_zero_rate), "\n");
      absl::StrAppend(&out, prefix, "validation_failures,", c.violations,
                      "\n");
    }
  }
  return out;
}

std::string FormatScoresJson(const BenchResult& result) {
  json j;
  j["format_version"] = kScoresFormatVersion;
  j["scenario"] = result.plan.scenario;
  j["synthesizer"] =
      std::string(SynthesizerKindName(result.plan.synthesizer.kind));
  j["normal_parameter"] =
      std::string(NormalParameterName(result.plan.normal_parameter));
  j["l"] = result.plan.l;
  j["m"] = result.plan.m;
  j["n"] = result.plan.n;
  j["seed"] = result.plan.seed.value_or(0);
  j["rmse_floor"] = result.rmse_floor;
  json subs = json::array();
  for (const SubPlanResult& r : result.sub_plans) {
    json s;
    s["n_train"] = r.sub_plan.n_train;
    s["epsilon"] = r.sub_plan.epsilon;
    s["delta"] = r.sub_plan.budget.delta;
    s["cells"] = r.cells.size();
    s["failures"] = r.failures;
    s["scores"] = ScoresToJson(r.scores);
    s["hierarchical_scores"] = ScoresToJson(r.hierarchical);
    s["realized_epsilon"] = {{"min", r.min_realized_epsilon},
                             {"max", r.max_realized_epsilon}};
    if (r.rubin) {
      s["combined_intervals"] = {
          {"coverage", r.rubin->coverage},
          {"uncongenial_coverage", r.rubin->uncongenial_coverage},
          {"fits", r.rubin->combined}};
    }
    subs.push_back(s);
  }
  j["sub_plans"] = subs;
  return j.dump(2) + "\n";
}

absl::Status WriteBenchOutputs(const BenchResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(result.plan.output_dir, ec);
  if (ec) {
    return absl::NotFoundError(absl::StrCat(
        "cannot create ", result.plan.output_dir, ": ", ec.message()));
  }
  const std::filesystem::path dir(result.plan.output_dir);
  for (const auto& [name, body] :
       {std::pair{"cells.csv", FormatCellsCsv(result)},
        std::pair{"scores.json", FormatScoresJson(result)}}) {
    std::ofstream out(dir / name, std::ios::binary);
    out << body;
    if (!out) {
      return absl::DataLossError(
          absl::StrCat("write failed: ", (dir / name).string()));
    }
  }
  return absl::OkStatus();
}

}  // namespace synthbench
