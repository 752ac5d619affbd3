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

// DP-GAN training loop.
//
// Each step first updates the discriminator on B real rows (sampled without
// replacement) paired with B generated rows. The pair (real_i, fake_i) is one
// privacy unit: its joint gradient is clipped to norm C, the clipped sum gets
// N(0, (sigma C)^2) noise and is divided by B. The generator is then updated
// on the non-saturating loss -log D(G(z)); it only sees the privatized
// discriminator, so its updates are not charged to the accountant.

#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "synthbench/synth.h"

namespace synthbench::gan {
namespace {

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Replaces each categorical block of `raw` with its Gumbel-Softmax sample.
Eigen::MatrixXd ApplyHead(const Eigen::MatrixXd& raw,
                          const OneHotEncoder& encoder, double temperature,
                          std::mt19937_64& rng) {
  Eigen::MatrixXd out = raw;
  std::vector<double> logits;
  std::vector<double> gumbel;
  for (const EncodedBlock& b : encoder.blocks()) {
    if (b.type != ColumnType::kCategorical) continue;
    logits.resize(b.width);
    gumbel.resize(b.width);
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
      for (int k = 0; k < b.width; ++k) {
        logits[k] = raw(i, b.offset + k);
        gumbel[k] = SampleGumbel(rng);
      }
      std::vector<double> p = GumbelSoftmaxWithNoise(logits, gumbel,
                                                     temperature);
      for (int k = 0; k < b.width; ++k) out(i, b.offset + k) = p[k];
    }
  }
  return out;
}

// Maps d loss / d head output back to d loss / d raw generator output.
Eigen::MatrixXd HeadBackward(const Eigen::MatrixXd& head_out,
                             const Eigen::MatrixXd& grad,
                             const OneHotEncoder& encoder,
                             double temperature) {
  Eigen::MatrixXd out = grad;
  std::vector<double> p;
  std::vector<double> g;
  for (const EncodedBlock& b : encoder.blocks()) {
    if (b.type != ColumnType::kCategorical) continue;
    p.resize(b.width);
    g.resize(b.width);
    for (Eigen::Index i = 0; i < grad.rows(); ++i) {
      for (int k = 0; k < b.width; ++k) {
        p[k] = head_out(i, b.offset + k);
        g[k] = grad(i, b.offset + k);
      }
      std::vector<double> d = GumbelSoftmaxBackward(p, g, temperature);
      for (int k = 0; k < b.width; ++k) out(i, b.offset + k) = d[k];
    }
  }
  return out;
}

Eigen::MatrixXd LatentBatch(int64_t n, int latent_dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(n, latent_dim);
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    for (Eigen::Index r = 0; r < z.rows(); ++r) z(r, c) = normal(rng);
  }
  return z;
}

std::vector<LayerConfig> HiddenStack(const std::vector<int>& units,
                                     double dropout) {
  std::vector<LayerConfig> layers;
  for (int u : units) layers.push_back({u, Activation::kLeakyRelu, dropout});
  return layers;
}

}  // namespace

Eigen::MatrixXd Generate(const Mlp& generator, const OneHotEncoder& encoder,
                         int latent_dim, double temperature, int64_t n,
                         Mode mode, std::mt19937_64& rng) {
  Eigen::MatrixXd z = LatentBatch(n, latent_dim, rng);
  absl::StatusOr<Activations> acts = Forward(generator, z, mode, rng);
  return ApplyHead(acts->output, encoder, temperature, rng);
}

absl::StatusOr<FitResult> Train(const GanConfig& config,
                                const PrivacyBudget& budget,
                                const Dataset& train, uint64_t seed) {
  const int64_t n = train.num_rows();
  const int batch = config.batch_size;
  if (n == 0) return absl::InvalidArgumentError("empty training data");
  if (batch <= 0 || batch > n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "batch size ", batch, " incompatible with ", n, " training rows"));
  }
  if (config.steps < 0 || config.latent_dim <= 0 ||
      !(config.temperature > 0.0)) {
    return absl::InvalidArgumentError("bad GAN configuration");
  }
  DpOptimizerConfig dp{config.adam, config.clip_norm, 0.0, batch};
  if (absl::Status s = dp.Check(); !s.ok()) return s;

  const double q = static_cast<double>(batch) / static_cast<double>(n);
  double sigma = 0.0;
  if (config.noise_multiplier.has_value()) {
    sigma = *config.noise_multiplier;
    if (!(sigma > 0.0)) {
      return absl::InvalidArgumentError("noise multiplier must be positive");
    }
  } else {
    absl::StatusOr<double> calibrated = CalibrateSigma(budget, q, config.steps);
    if (!calibrated.ok()) return calibrated.status();
    sigma = *calibrated;
  }
  absl::StatusOr<AccountantState> accountant = AccountantState::Create(q, sigma);
  if (!accountant.ok()) return accountant.status();

  absl::StatusOr<OneHotEncoder> encoder = OneHotEncoder::Fit(train);
  if (!encoder.ok()) return encoder.status();
  const Eigen::MatrixXd real_all = encoder->Encode(train);
  const int width = encoder->width();

  std::vector<LayerConfig> g_layers =
      HiddenStack(config.generator_hidden, config.generator_dropout);
  g_layers.push_back({width, Activation::kIdentity, 0.0});
  std::vector<LayerConfig> d_layers =
      HiddenStack(config.discriminator_hidden, 0.0);
  d_layers.push_back({1, Activation::kIdentity, 0.0});

  std::mt19937_64 rng(seed);
  absl::StatusOr<Mlp> generator =
      Mlp::Create(config.latent_dim, g_layers, rng());
  if (!generator.ok()) return generator.status();
  absl::StatusOr<Mlp> discriminator = Mlp::Create(width, d_layers, rng());
  if (!discriminator.ok()) return discriminator.status();

  AdamState g_opt = AdamState::Zeros(generator->num_parameters());
  AdamState d_opt = AdamState::Zeros(discriminator->num_parameters());

  std::vector<int64_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<int> example_of_row(2 * batch);
  for (int i = 0; i < batch; ++i) {
    example_of_row[i] = i;
    example_of_row[batch + i] = i;
  }
  Eigen::MatrixXd stacked(2 * batch, width);
  Eigen::MatrixXd d_grad(2 * batch, 1);

  for (int step = 0; step < config.steps; ++step) {
    // Discriminator update on a uniformly drawn batch of distinct rows.
    for (int k = 0; k < batch; ++k) {
      std::uniform_int_distribution<int64_t> pick(k, n - 1);
      std::swap(pool[k], pool[pick(rng)]);
      stacked.row(k) = real_all.row(pool[k]);
    }
    stacked.bottomRows(batch) =
        Generate(*generator, *encoder, config.latent_dim, config.temperature,
                 batch, Mode::kTraining, rng);
    absl::StatusOr<Activations> d_acts =
        Forward(*discriminator, stacked, Mode::kTraining, rng);
    if (!d_acts.ok()) return d_acts.status();
    for (int i = 0; i < 2 * batch; ++i) {
      const double s = Sigmoid(d_acts->output(i, 0));
      // -log D(x) for real rows, -log(1 - D(x)) for generated rows.
      d_grad(i, 0) = i < batch ? s - 1.0 : s;
    }
    absl::StatusOr<ClippedGradient> clipped =
        ClippedGradientSum(*discriminator, *d_acts, d_grad, example_of_row,
                           batch, config.clip_norm);
    if (!clipped.ok()) return clipped.status();
    const Eigen::VectorXd noisy =
        NoisyMean(clipped->sum, batch, config.clip_norm, sigma, rng);
    if (absl::Status s = AdamStep(discriminator->mutable_parameters(), noisy,
                                  d_opt, config.adam);
        !s.ok()) {
      return s;
    }
    *accountant = Compose(*accountant, 1);

    // Generator update through the (already privatized) discriminator.
    const Eigen::MatrixXd z = LatentBatch(batch, config.latent_dim, rng);
    absl::StatusOr<Activations> g_acts =
        Forward(*generator, z, Mode::kTraining, rng);
    if (!g_acts.ok()) return g_acts.status();
    const Eigen::MatrixXd fake =
        ApplyHead(g_acts->output, *encoder, config.temperature, rng);
    absl::StatusOr<Activations> df_acts =
        Forward(*discriminator, fake, Mode::kEvaluation, rng);
    if (!df_acts.ok()) return df_acts.status();
    Eigen::MatrixXd g_loss_grad(batch, 1);
    for (int i = 0; i < batch; ++i) {
      g_loss_grad(i, 0) = (Sigmoid(df_acts->output(i, 0)) - 1.0) / batch;
    }
    absl::StatusOr<BatchGradient> through_d =
        BackwardBatch(*discriminator, *df_acts, g_loss_grad);
    if (!through_d.ok()) return through_d.status();
    const Eigen::MatrixXd raw_grad =
        HeadBackward(fake, through_d->inputs, *encoder, config.temperature);
    absl::StatusOr<BatchGradient> g_grad =
        BackwardBatch(*generator, *g_acts, raw_grad);
    if (!g_grad.ok()) return g_grad.status();
    if (absl::Status s = AdamStep(generator->mutable_parameters(),
                                  g_grad->parameters, g_opt, config.adam);
        !s.ok()) {
      return s;
    }
  }

  return FitResult{std::move(*generator), std::move(*discriminator),
                   std::move(*encoder), std::move(*accountant), sigma};
}

}  // namespace synthbench::gan
