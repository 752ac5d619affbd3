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

// Uniform fit/sample contract over three synthesizers:
//
//   Resampler   non-private bootstrap of the training table (calibration
//               baseline).
//   DpMarginal  Laplace-noised one-way histograms; columns tied by a
//               structural-zero rule share one joint histogram.
//   DpGan       GAN whose discriminator is trained with clipped, noised
//               Adam updates and charged to a Renyi-DP accountant.
//
// DP models hold only noised statistics or generator weights, never the
// training rows, so sampling is post-processing and costs no budget.

#ifndef SYNTHBENCH_SYNTH_H_
#define SYNTHBENCH_SYNTH_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "synthbench/accountant.h"
#include "synthbench/nn.h"
#include "synthbench/tabular.h"

namespace synthbench {

enum class SynthesizerKind { kResampler, kDpMarginal, kDpGan };

absl::StatusOr<SynthesizerKind> ParseSynthesizerKind(std::string_view name);
std::string_view SynthesizerKindName(SynthesizerKind kind);

struct MarginalConfig {
  int bins = 32;
  // Model the columns of each structural-zero rule jointly. Turning this off
  // is only useful for auditing how often independent marginals break rules.
  bool joint_zero_rules = true;
};

struct GanConfig {
  int steps = 2000;
  int batch_size = 100;
  int latent_dim = 32;
  std::vector<int> generator_hidden = {256, 128, 128};
  std::vector<int> discriminator_hidden = {256, 128, 128};
  double generator_dropout = 0.5;
  double temperature = 0.5;
  AdamConfig adam;
  double clip_norm = 1.0;
  // Overrides calibration from the privacy budget when set.
  std::optional<double> noise_multiplier;
};

struct SynthesizerSpec {
  SynthesizerKind kind = SynthesizerKind::kResampler;
  MarginalConfig marginal;
  GanConfig gan;
  PrivacyBudget budget;
  uint64_t seed = 0;

  absl::Status Check() const;
};

struct ResamplerState {
  Dataset table;
};

// One noised histogram over a single column or over the product of the
// levels of a group of categorical columns.
struct MarginalFactor {
  std::vector<int> columns;
  // Continuous and count columns: equal-width bins over [lo, hi].
  double lo = 0.0;
  double hi = 0.0;
  int bins = 0;
  std::vector<double> probabilities;
};

struct MarginalState {
  std::vector<MarginalFactor> factors;
};

struct GanState {
  Mlp generator;
  OneHotEncoder encoder;
  int latent_dim = 32;
  double temperature = 0.5;
};

struct TrainingMetadata {
  int64_t steps = 0;
  double noise_multiplier = 0.0;
  double clip_norm = 0.0;
  double sampling_rate = 0.0;
  double rdp_order = 0.0;
};

struct SynthesizerModel {
  SynthesizerKind kind = SynthesizerKind::kResampler;
  Schema schema;
  std::variant<ResamplerState, MarginalState, GanState> state;
  // Unset for the resampler.
  std::optional<PrivacyBudget> realized;
  std::optional<AccountantState> accountant;
  TrainingMetadata metadata;
};

absl::StatusOr<SynthesizerModel> Fit(const SynthesizerSpec& spec,
                                     const Dataset& train);

// Valid dataset with every structural-zero rule enforced.
absl::StatusOr<Dataset> Sample(const SynthesizerModel& model, int64_t n,
                               uint64_t seed);

// Model output before structural-zero enforcement.
absl::StatusOr<Dataset> SampleRaw(const SynthesizerModel& model, int64_t n,
                                  uint64_t seed);

// Rows whose guard column is at the guard level get the forced level; every
// other cell is left untouched. Idempotent.
Dataset EnforceStructuralZeros(const Dataset& data);

std::string SerializeModel(const SynthesizerModel& model);
absl::StatusOr<SynthesizerModel> ParseModel(std::string_view text);
absl::Status SaveModel(const SynthesizerModel& model, const std::string& path);
absl::StatusOr<SynthesizerModel> LoadModel(const std::string& path);

// DP-GAN internals, exposed for testing.
namespace gan {

struct FitResult {
  Mlp generator;
  Mlp discriminator;
  OneHotEncoder encoder;
  AccountantState accountant;
  double noise_multiplier = 0.0;
};

absl::StatusOr<FitResult> Train(const GanConfig& config,
                                const PrivacyBudget& budget,
                                const Dataset& train, uint64_t seed);

// Generator output with Gumbel-Softmax applied to categorical blocks.
Eigen::MatrixXd Generate(const Mlp& generator, const OneHotEncoder& encoder,
                         int latent_dim, double temperature, int64_t n,
                         Mode mode, std::mt19937_64& rng);

}  // namespace gan

}  // namespace synthbench

#endif  // SYNTHBENCH_SYNTH_H_
