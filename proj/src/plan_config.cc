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

// Plan file reader. Keys:
//
//   scenario, l, m, n, n_train (list), epsilon (list), synthesizer,
//   normal_parameter, seed, wasserstein_null_iters, pmse_null_iters,
//   coverage_level, workers, output_dir,
//   gan.steps, gan.batch_size, gan.latent_dim, gan.learning_rate,
//   gan.beta1, gan.beta2, gan.clip_norm, gan.noise_multiplier, gan.dropout,
//   gan.temperature, marginal.bins, marginal.joint_zero_rules,
//   cart.max_depth, cart.min_leaf, cart.complexity

#include <charconv>
#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "synthbench/bench.h"
#include "text_util.h"

namespace synthbench {
namespace {

template <typename T>
absl::StatusOr<T> ParseNumber(std::string_view text) {
  text = internal::StripWhitespace(text);
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", std::string(text), "' is not a valid number"));
  }
  return value;
}

template <typename T>
absl::StatusOr<std::vector<T>> ParseList(std::string_view text) {
  std::vector<T> out;
  for (std::string_view item : internal::Split(text, ',')) {
    absl::StatusOr<T> v = ParseNumber<T>(item);
    if (!v.ok()) return v.status();
    out.push_back(*v);
  }
  return out;
}

absl::StatusOr<bool> ParseBool(std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  return absl::InvalidArgumentError(
      absl::StrCat("'", std::string(text), "' is not true or false"));
}

template <typename T>
absl::Status Assign(T& field, std::string_view value) {
  absl::StatusOr<T> v = ParseNumber<T>(value);
  if (!v.ok()) return v.status();
  field = *v;
  return absl::OkStatus();
}

}  // namespace

absl::Status SetPlanKey(BenchPlan& plan, std::string_view key,
                        std::string_view value) {
  value = internal::StripWhitespace(value);
  if (key == "scenario") return Assign(plan.scenario, value);
  if (key == "l") return Assign(plan.l, value);
  if (key == "m") return Assign(plan.m, value);
  if (key == "n") return Assign(plan.n, value);
  if (key == "n_train") {
    absl::StatusOr<std::vector<int64_t>> v = ParseList<int64_t>(value);
    if (!v.ok()) return v.status();
    plan.n_train = *v;
    return absl::OkStatus();
  }
  if (key == "epsilon") {
    absl::StatusOr<std::vector<double>> v = ParseList<double>(value);
    if (!v.ok()) return v.status();
    plan.epsilon = *v;
    return absl::OkStatus();
  }
  if (key == "synthesizer") {
    absl::StatusOr<SynthesizerKind> kind = ParseSynthesizerKind(value);
    if (!kind.ok()) return kind.status();
    plan.synthesizer.kind = *kind;
    return absl::OkStatus();
  }
  if (key == "normal_parameter") {
    absl::StatusOr<NormalParameter> p = ParseNormalParameter(value);
    if (!p.ok()) return p.status();
    plan.normal_parameter = *p;
    return absl::OkStatus();
  }
  if (key == "seed") {
    uint64_t seed = 0;
    if (absl::Status s = Assign(seed, value); !s.ok()) return s;
    plan.seed = seed;
    return absl::OkStatus();
  }
  if (key == "wasserstein_null_iters") {
    return Assign(plan.wasserstein_null_iters, value);
  }
  if (key == "pmse_null_iters") return Assign(plan.pmse_null_iters, value);
  if (key == "coverage_level") return Assign(plan.coverage_level, value);
  if (key == "workers") return Assign(plan.workers, value);
  if (key == "output_dir") {
    plan.output_dir = std::string(value);
    return absl::OkStatus();
  }
  GanConfig& gan = plan.synthesizer.gan;
  if (key == "gan.steps") return Assign(gan.steps, value);
  if (key == "gan.batch_size") return Assign(gan.batch_size, value);
  if (key == "gan.latent_dim") return Assign(gan.latent_dim, value);
  if (key == "gan.learning_rate") {
    return Assign(gan.adam.learning_rate, value);
  }
  if (key == "gan.beta1") return Assign(gan.adam.beta1, value);
  if (key == "gan.beta2") return Assign(gan.adam.beta2, value);
  if (key == "gan.clip_norm") return Assign(gan.clip_norm, value);
  if (key == "gan.dropout") return Assign(gan.generator_dropout, value);
  if (key == "gan.temperature") return Assign(gan.temperature, value);
  if (key == "gan.noise_multiplier") {
    double sigma = 0.0;
    if (absl::Status s = Assign(sigma, value); !s.ok()) return s;
    gan.noise_multiplier = sigma;
    return absl::OkStatus();
  }
  if (key == "marginal.bins") {
    return Assign(plan.synthesizer.marginal.bins, value);
  }
  if (key == "marginal.joint_zero_rules") {
    absl::StatusOr<bool> b = ParseBool(value);
    if (!b.ok()) return b.status();
    plan.synthesizer.marginal.joint_zero_rules = *b;
    return absl::OkStatus();
  }
  if (key == "cart.max_depth") return Assign(plan.cart.max_depth, value);
  if (key == "cart.min_leaf") return Assign(plan.cart.min_leaf, value);
  if (key == "cart.complexity") return Assign(plan.cart.complexity, value);
  return absl::InvalidArgumentError("unknown key");
}

absl::StatusOr<BenchPlan> ParsePlan(std::string_view text) {
  BenchPlan plan;
  int line_number = 0;
  for (std::string_view line : internal::Split(text, '\n')) {
    ++line_number;
    if (size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = internal::StripWhitespace(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      return absl::InvalidArgumentError(absl::StrCat(
          "config line ", line_number, ": expected 'key = value'"));
    }
    const std::string_view key = internal::StripWhitespace(line.substr(0, eq));
    if (absl::Status s = SetPlanKey(plan, key, line.substr(eq + 1)); !s.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("config line ", line_number, ", key '", std::string(key),
                       "': ", s.message()));
    }
  }
  return plan;
}

absl::StatusOr<BenchPlan> LoadPlan(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  absl::StatusOr<BenchPlan> plan = ParsePlan(buffer.str());
  if (!plan.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": ", plan.status().message()));
  }
  return plan;
}

absl::Status BenchPlan::Check() const {
  if (scenario != 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("scenario ", scenario, " is not supported"));
  }
  if (l < 1 || m < 1 || n < 1) {
    return absl::InvalidArgumentError("l, m and n must be >= 1");
  }
  if (n_train.empty() || epsilon.empty()) {
    return absl::InvalidArgumentError("n_train and epsilon must be non-empty");
  }
  for (int64_t size : n_train) {
    if (size < 2 * cart.min_leaf) {
      return absl::InvalidArgumentError(
          absl::StrCat("n_train ", size, " is too small"));
    }
  }
  for (double e : epsilon) {
    if (!(e > 0.0)) {
      return absl::InvalidArgumentError("epsilon values must be positive");
    }
  }
  if (wasserstein_null_iters < 1 || pmse_null_iters < 1) {
    return absl::InvalidArgumentError("null iteration counts must be >= 1");
  }
  if (!(coverage_level > 0.0 && coverage_level < 1.0)) {
    return absl::InvalidArgumentError("coverage_level must lie in (0, 1)");
  }
  if (workers < 1) return absl::InvalidArgumentError("workers must be >= 1");
  return absl::OkStatus();
}

}  // namespace synthbench
