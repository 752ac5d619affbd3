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

// synthbench command line.
//
//   synthbench generate   --n 1000 --seed 7 --out train.csv
//   synthbench fit        --train train.csv --synthesizer dp_gan --epsilon 1
//                         --seed 3 --out model.json
//   synthbench sample     --model model.json --n 1000 --seed 4 --out s.csv
//   synthbench evaluate   --real train.csv --synth s.csv
//   synthbench bench      --config configs/desk.plan --seed 1
//   synthbench report     --scores bench_out/scores.json
//   synthbench accountant --q 0.01 --sigma 1.1 --steps 1000,2000

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "synthbench/accountant.h"
#include "synthbench/bench.h"
#include "synthbench/dgp.h"
#include "synthbench/metrics.h"
#include "synthbench/report.h"
#include "synthbench/seeding.h"
#include "synthbench/synth.h"
#include "synthbench/tabular.h"

namespace synthbench {
namespace {

int Fail(const absl::Status& status) {
  std::fprintf(stderr, "error: %s\n", std::string(status.message()).c_str());
  return 1;
}

absl::StatusOr<Schema> LoadSchema(const std::string& path) {
  if (path.empty()) return Scenario1Schema();
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return Schema::Parse(buffer.str());
}

absl::Status WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::NotFoundError(absl::StrCat("cannot write ", path));
  out << text;
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

struct GenerateArgs {
  int scenario = 1;
  int64_t n = 1000;
  uint64_t seed = 0;
  std::string out;
  std::string normal_parameter = "variance";
};

int RunGenerate(const GenerateArgs& a) {
  if (a.scenario != 1) {
    return Fail(absl::InvalidArgumentError(
        absl::StrCat("scenario ", a.scenario, " is not supported")));
  }
  absl::StatusOr<NormalParameter> np = ParseNormalParameter(a.normal_parameter);
  if (!np.ok()) return Fail(np.status());
  absl::StatusOr<Dataset> data =
      GenerateScenario1(a.n, a.seed, Scenario1Params::ForConvention(*np));
  if (!data.ok()) return Fail(data.status());
  if (absl::Status s = WriteCsv(*data, a.out); !s.ok()) return Fail(s);
  return 0;
}

struct FitArgs {
  std::string train;
  std::string schema;
  std::string synthesizer = "dp_gan";
  double epsilon = 1.0;
  std::optional<double> delta;
  uint64_t seed = 0;
  std::string out;
  std::vector<std::string> set;
};

int RunFit(const FitArgs& a) {
  absl::StatusOr<Schema> schema = LoadSchema(a.schema);
  if (!schema.ok()) return Fail(schema.status());
  absl::StatusOr<Dataset> train = ReadCsv(a.train, *schema);
  if (!train.ok()) return Fail(train.status());
  // Hyperparameters use the plan keys (gan.steps=500, marginal.bins=16, ...).
  BenchPlan plan;
  if (absl::Status s = SetPlanKey(plan, "synthesizer", a.synthesizer); !s.ok()) {
    return Fail(s);
  }
  for (const std::string& kv : a.set) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      return Fail(absl::InvalidArgumentError(
          absl::StrCat("--set expects key=value, got '", kv, "'")));
    }
    if (absl::Status s = SetPlanKey(plan, kv.substr(0, eq), kv.substr(eq + 1));
        !s.ok()) {
      return Fail(absl::InvalidArgumentError(
          absl::StrCat("--set ", kv, ": ", s.message())));
    }
  }
  SynthesizerSpec spec = plan.synthesizer;
  spec.budget = PrivacyBudget::ForTrainingSize(a.epsilon, train->num_rows());
  if (a.delta) spec.budget.delta = *a.delta;
  spec.seed = a.seed;
  absl::StatusOr<SynthesizerModel> model = Fit(spec, *train);
  if (!model.ok()) return Fail(model.status());
  if (absl::Status s = SaveModel(*model, a.out); !s.ok()) return Fail(s);
  if (model->realized) {
    std::printf("realized epsilon %.6f delta %.6g\n", model->realized->epsilon,
                model->realized->delta);
  }
  return 0;
}

struct SampleArgs {
  std::string model;
  int64_t n = 0;
  uint64_t seed = 0;
  std::string out;
  bool raw = false;
};

int RunSample(const SampleArgs& a) {
  absl::StatusOr<SynthesizerModel> model = LoadModel(a.model);
  if (!model.ok()) return Fail(model.status());
  absl::StatusOr<Dataset> data =
      a.raw ? SampleRaw(*model, a.n, a.seed) : Sample(*model, a.n, a.seed);
  if (!data.ok()) return Fail(data.status());
  if (absl::Status s = WriteCsv(*data, a.out); !s.ok()) return Fail(s);
  return 0;
}

struct EvaluateArgs {
  std::string real;
  std::string synth;
  std::string schema;
  uint64_t seed = 0;
  int wasserstein_iters = kDefaultWassersteinNullIters;
  int pmse_iters = kDefaultPmseNullIters;
  CartConfig cart;
};

int RunEvaluate(const EvaluateArgs& a) {
  absl::StatusOr<Schema> schema = LoadSchema(a.schema);
  if (!schema.ok()) return Fail(schema.status());
  absl::StatusOr<Dataset> real = ReadCsv(a.real, *schema);
  if (!real.ok()) return Fail(real.status());
  absl::StatusOr<Dataset> synth = ReadCsv(a.synth, *schema);
  if (!synth.ok()) return Fail(synth.status());

  absl::StatusOr<WassersteinReport> w = MarginalReport(
      *real, *synth, a.wasserstein_iters,
      SeedFor(a.seed, 0, 0, 0, StreamTag::kWassersteinNull));
  if (!w.ok()) return Fail(w.status());
  absl::StatusOr<PmseReport> p =
      PmseRatio(*real, *synth, a.cart, a.pmse_iters,
                SeedFor(a.seed, 0, 0, 0, StreamTag::kPmseNull));
  if (!p.ok()) return Fail(p.status());

  std::printf("metric,column,value\n");
  for (const ColumnDistance& c : w->columns) {
    std::printf("%s,%s,%.6g\n",
                c.total_variation ? "tv_ratio" : "wasserstein_ratio",
                c.column.c_str(), c.score.ratio);
  }
  std::printf("wasserstein_ratio_mean,,%.6g\n", w->mean_ratio);
  std::printf("pmse,,%.6g\n", p->pmse);
  std::printf("pmse_null_mean,,%.6g\n", p->null_mean);
  std::printf("pmse_ratio,,%.6g\n", p->ratio);
  std::printf("structural_zero_rate,,%.6g\n", StructuralZeroRate(*synth));

  if (schema->outcome_column() >= 0 && *schema == Scenario1Schema()) {
    const LinearFormula formula = Scenario1Formula();
    absl::StatusOr<RegressionFit> fr = OlsFit(*real, formula);
    absl::StatusOr<RegressionFit> fs = OlsFit(*synth, formula);
    if (fr.ok() && fs.ok()) {
      absl::StatusOr<TrainingScores> t = SpecificTrainingScores(*fs, *fr);
      if (t.ok()) {
        std::printf("coef_bias_percent,,%.6g\n", t->percent_bias);
        std::printf("covariance_ratio,,%.6g\n", t->variance_ratio);
      }
    }
  }
  return 0;
}

struct BenchArgs {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<int> workers;
  std::string output_dir;
  std::vector<std::string> set;
};

int RunBench(const BenchArgs& a) {
  absl::StatusOr<BenchPlan> plan = LoadPlan(a.config);
  if (!plan.ok()) return Fail(plan.status());
  for (const std::string& kv : a.set) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      return Fail(absl::InvalidArgumentError(
          absl::StrCat("--set expects key=value, got '", kv, "'")));
    }
    if (absl::Status s =
            SetPlanKey(*plan, kv.substr(0, eq), kv.substr(eq + 1));
        !s.ok()) {
      return Fail(absl::InvalidArgumentError(
          absl::StrCat("--set ", kv, ": ", s.message())));
    }
  }
  plan->seed = a.seed;
  if (a.workers) plan->workers = *a.workers;
  if (!a.output_dir.empty()) plan->output_dir = a.output_dir;
  absl::StatusOr<BenchResult> result = RunPlan(*plan);
  if (!result.ok()) return Fail(result.status());
  if (absl::Status s = WriteBenchOutputs(*result); !s.ok()) return Fail(s);
  // Self-anchored chart of the first sub-plan; `report` redraws it with
  // another anchor or sub-plan.
  absl::StatusOr<RadarSpec> spec = NormalizeScores(
      result->sub_plans.front().scores, std::nullopt, result->rmse_floor,
      plan->coverage_level);
  if (!spec.ok()) return Fail(spec.status());
  if (absl::Status s = WriteRadar(*spec, plan->output_dir + "/radar.svg");
      !s.ok()) {
    return Fail(s);
  }
  std::printf("wrote cells.csv, scores.json and radar.svg to %s\n",
              plan->output_dir.c_str());
  return 0;
}

struct ReportArgs {
  std::string scores;
  std::string anchor;
  std::string out_dir;
  int sub_plan = 0;
  double coverage_level = 0.9;
};

int RunReport(const ReportArgs& a) {
  absl::StatusOr<ScoresFile> file = LoadScoresJson(a.scores);
  if (!file.ok()) return Fail(file.status());
  if (a.sub_plan < 0 || a.sub_plan >= static_cast<int>(file->entries.size())) {
    return Fail(absl::OutOfRangeError(
        absl::StrCat("sub-plan ", a.sub_plan, " not in scores file")));
  }
  std::optional<NineScores> anchor;
  if (!a.anchor.empty()) {
    absl::StatusOr<ScoresFile> base = LoadScoresJson(a.anchor);
    if (!base.ok()) return Fail(base.status());
    if (a.sub_plan >= static_cast<int>(base->entries.size())) {
      return Fail(absl::OutOfRangeError("anchor lacks the chosen sub-plan"));
    }
    anchor = base->entries[a.sub_plan].scores;
  }
  const ScoresFileEntry& entry = file->entries[a.sub_plan];
  absl::StatusOr<RadarSpec> spec = NormalizeScores(
      entry.scores, anchor, file->rmse_floor, a.coverage_level);
  if (!spec.ok()) return Fail(spec.status());
  char title[128];
  std::snprintf(title, sizeof(title), "%s, n_train=%lld, epsilon=%g",
                file->synthesizer.c_str(),
                static_cast<long long>(entry.n_train), entry.epsilon);
  spec->title = title;
  std::string dir = a.out_dir;
  if (dir.empty()) {
    const size_t slash = a.scores.find_last_of('/');
    dir = slash == std::string::npos ? "." : a.scores.substr(0, slash);
  }
  if (absl::Status s = WriteRadar(*spec, dir + "/radar.svg"); !s.ok()) {
    return Fail(s);
  }
  const std::string table = FormatScoresTable(*file);
  if (absl::Status s = WriteText(dir + "/scores_table.md", table); !s.ok()) {
    return Fail(s);
  }
  std::printf("%s", table.c_str());
  return 0;
}

struct AccountantArgs {
  double q = 0.01;
  std::optional<double> sigma;
  std::vector<int64_t> steps = {2000};
  double delta = 5e-5;
  std::optional<double> target_epsilon;
  std::string out;
};

int RunAccountant(const AccountantArgs& a) {
  std::string csv = "q,sigma,steps,delta,epsilon,order\n";
  for (int64_t t : a.steps) {
    double sigma = 0.0;
    if (a.sigma) {
      sigma = *a.sigma;
    } else if (a.target_epsilon) {
      absl::StatusOr<double> s =
          CalibrateSigma({*a.target_epsilon, a.delta}, a.q, t);
      if (!s.ok()) return Fail(s.status());
      sigma = *s;
    } else {
      return Fail(absl::InvalidArgumentError(
          "pass --sigma or --target-epsilon"));
    }
    absl::StatusOr<AccountantState> state = AccountantState::Create(a.q, sigma);
    if (!state.ok()) return Fail(state.status());
    absl::StatusOr<EpsilonResult> eps = ToEpsilon(Compose(*state, t), a.delta);
    if (!eps.ok()) return Fail(eps.status());
    char line[256];
    std::snprintf(line, sizeof(line), "%g,%.6f,%lld,%g,%.6f,%g\n", a.q, sigma,
                  static_cast<long long>(t), a.delta, eps->epsilon, eps->order);
    csv += line;
  }
  std::printf("%s", csv.c_str());
  if (!a.out.empty()) {
    if (absl::Status s = WriteText(a.out, csv); !s.ok()) return Fail(s);
  }
  return 0;
}

}  // namespace
}  // namespace synthbench

int main(int argc, char** argv) {
  using namespace synthbench;
  CLI::App app{"Synthetic data benchmark with differentially private "
               "synthesizers"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* g = app.add_subcommand("generate", "Sample the scenario DGP to CSV");
  g->add_option("--scenario", gen.scenario, "Scenario id (only 1)");
  g->add_option("--n", gen.n, "Rows")->required();
  g->add_option("--seed", gen.seed, "Seed")->required();
  g->add_option("--out", gen.out, "Output CSV")->required();
  g->add_option("--normal-parameter", gen.normal_parameter,
                "variance or sd");

  FitArgs fit;
  CLI::App* f = app.add_subcommand("fit", "Fit a synthesizer");
  f->add_option("--train", fit.train, "Training CSV")->required();
  f->add_option("--schema", fit.schema, "Schema file (default scenario 1)");
  f->add_option("--synthesizer", fit.synthesizer,
                "resampler, dp_marginal or dp_gan");
  f->add_option("--epsilon", fit.epsilon, "Target epsilon");
  f->add_option("--delta", fit.delta, "Target delta (default 1/(2N))");
  f->add_option("--seed", fit.seed, "Seed")->required();
  f->add_option("--out", fit.out, "Model file")->required();
  f->add_option("--set", fit.set, "Hyperparameter key=value (plan keys)");

  SampleArgs smp;
  CLI::App* s = app.add_subcommand("sample", "Sample from a saved model");
  s->add_option("--model", smp.model, "Model file")->required();
  s->add_option("--n", smp.n, "Rows")->required();
  s->add_option("--seed", smp.seed, "Seed")->required();
  s->add_option("--out", smp.out, "Output CSV")->required();
  s->add_flag("--raw", smp.raw, "Skip structural-zero enforcement");

  EvaluateArgs ev;
  CLI::App* e = app.add_subcommand("evaluate", "Score a (real, synthetic) pair");
  e->add_option("--real", ev.real, "Real CSV")->required();
  e->add_option("--synth", ev.synth, "Synthetic CSV")->required();
  e->add_option("--schema", ev.schema, "Schema file (default scenario 1)");
  e->add_option("--seed", ev.seed, "Seed for the null loops");
  e->add_option("--wasserstein-iters", ev.wasserstein_iters, "Null draws");
  e->add_option("--pmse-iters", ev.pmse_iters, "Null refits");
  e->add_option("--cart-complexity", ev.cart.complexity,
                "Minimum relative impurity decrease per split");
  e->add_option("--cart-min-leaf", ev.cart.min_leaf, "Minimum leaf size");

  BenchArgs bn;
  CLI::App* b = app.add_subcommand("bench", "Run a benchmark plan");
  b->add_option("--config", bn.config, "Plan file")->required();
  b->add_option("--seed", bn.seed, "Master seed")->required();
  b->add_option("--workers", bn.workers, "Worker threads");
  b->add_option("--output-dir", bn.output_dir, "Output directory");
  b->add_option("--set", bn.set, "Override a plan key (key=value)");

  ReportArgs rp;
  CLI::App* r = app.add_subcommand("report", "Render radar chart and tables");
  r->add_option("--scores", rp.scores, "scores.json")->required();
  r->add_option("--anchor", rp.anchor, "Anchor scores.json (default: self)");
  r->add_option("--out-dir", rp.out_dir, "Output directory");
  r->add_option("--sub-plan", rp.sub_plan, "Sub-plan index");
  r->add_option("--coverage-level", rp.coverage_level, "Nominal coverage");

  AccountantArgs ac;
  CLI::App* a = app.add_subcommand("accountant", "Print an epsilon table");
  a->add_option("--q", ac.q, "Sampling rate");
  a->add_option("--sigma", ac.sigma, "Noise multiplier");
  a->add_option("--target-epsilon", ac.target_epsilon,
                "Calibrate sigma to this epsilon instead");
  a->add_option("--steps", ac.steps, "Step counts")->delimiter(',');
  a->add_option("--delta", ac.delta, "Delta");
  a->add_option("--out", ac.out, "Also write the table here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err);
  }
  if (*g) return RunGenerate(gen);
  if (*f) return RunFit(fit);
  if (*s) return RunSample(smp);
  if (*e) return RunEvaluate(ev);
  if (*b) return RunBench(bn);
  if (*r) return RunReport(rp);
  if (*a) return RunAccountant(ac);
  return 1;
}
