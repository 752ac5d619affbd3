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

// Fixed-architecture multilayer perceptrons with the pieces DP-SGD needs:
// per-example gradients, clipping with Gaussian noise, Adam, and
// Gumbel-Softmax sampling. Batches are row-major in the sense that each row
// of an Eigen matrix is one example.

#ifndef SYNTHBENCH_NN_H_
#define SYNTHBENCH_NN_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace synthbench {

enum class Activation { kIdentity, kLeakyRelu, kSigmoid };

inline constexpr double kLeakySlope = 0.2;

struct LayerConfig {
  int units = 0;
  Activation activation = Activation::kIdentity;
  // Inverted dropout applied to this layer's output in training mode.
  double dropout = 0.0;
};

struct LayerShape {
  int in = 0;
  int out = 0;
  // Offsets into the flat parameter vector. Weights are stored column-major
  // as an (out x in) matrix, followed by the bias.
  int weight_offset = 0;
  int bias_offset = 0;
  Activation activation = Activation::kIdentity;
  double dropout = 0.0;
};

class Mlp {
 public:
  Mlp() = default;

  // Glorot-uniform weights, zero biases.
  static absl::StatusOr<Mlp> Create(int input_dim,
                                    std::span<const LayerConfig> layers,
                                    uint64_t seed);
  static absl::StatusOr<Mlp> FromParameters(int input_dim,
                                            std::span<const LayerConfig> layers,
                                            Eigen::VectorXd parameters);

  int input_dim() const { return input_dim_; }
  int output_dim() const { return layers_.back().out; }
  int num_parameters() const { return static_cast<int>(params_.size()); }
  const std::vector<LayerShape>& layers() const { return layers_; }
  std::vector<LayerConfig> layer_configs() const;

  const Eigen::VectorXd& parameters() const { return params_; }
  // Every mutable access invalidates cached activations.
  Eigen::VectorXd& mutable_parameters() {
    ++version_;
    return params_;
  }
  uint64_t version() const { return version_; }

  Eigen::Map<const Eigen::MatrixXd> weight(int layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const;

 private:
  int input_dim_ = 0;
  std::vector<LayerShape> layers_;
  Eigen::VectorXd params_;
  uint64_t version_ = 0;
};

enum class Mode { kTraining, kEvaluation };

struct Activations {
  // Per layer: its input, pre-activation and dropout scale mask (empty when
  // no dropout was applied).
  std::vector<Eigen::MatrixXd> inputs;
  std::vector<Eigen::MatrixXd> pre;
  std::vector<Eigen::MatrixXd> masks;
  Eigen::MatrixXd output;
  Mode mode = Mode::kEvaluation;
  uint64_t net_version = 0;
};

absl::StatusOr<Activations> Forward(const Mlp& net,
                                    const Eigen::MatrixXd& batch, Mode mode,
                                    std::mt19937_64& rng);

struct BatchGradient {
  // Sum over examples of d loss / d parameters.
  Eigen::VectorXd parameters;
  // d loss / d input, one row per example.
  Eigen::MatrixXd inputs;
};

// `output_grad` holds d loss_i / d output_i for every row i.
absl::StatusOr<BatchGradient> BackwardBatch(const Mlp& net,
                                            const Activations& acts,
                                            const Eigen::MatrixXd& output_grad);

// (num_parameters x batch) matrix, one column per example.
absl::StatusOr<Eigen::MatrixXd> BackwardPerExample(
    const Mlp& net, const Activations& acts,
    const Eigen::MatrixXd& output_grad);

struct ClippedGradient {
  Eigen::VectorXd sum;
  // Unclipped per-example L2 norms.
  std::vector<double> norms;
};

// Sum of per-example gradients, each rescaled by min(1, C / ||g_e||), without
// materializing them. Row r of the batch contributes to example
// `example_of_row[r]`; an example may span several rows (e.g. a real and a
// generated record scored together).
absl::StatusOr<ClippedGradient> ClippedGradientSum(
    const Mlp& net, const Activations& acts, const Eigen::MatrixXd& output_grad,
    std::span<const int> example_of_row, int num_examples, double clip_norm);

// Adds N(0, (sigma C / B)^2) to every coordinate of clipped_sum / B.
Eigen::VectorXd NoisyMean(const Eigen::VectorXd& clipped_sum, int batch_size,
                          double clip_norm, double noise_multiplier,
                          std::mt19937_64& rng);

// Clips every column of `per_example` to norm <= C, averages, adds noise.
Eigen::VectorXd ClipNoiseAggregate(const Eigen::MatrixXd& per_example,
                                   double clip_norm, double noise_multiplier,
                                   std::mt19937_64& rng);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  int64_t t = 0;

  static AdamState Zeros(int size) {
    return {Eigen::VectorXd::Zero(size), Eigen::VectorXd::Zero(size), 0};
  }
};

absl::Status AdamStep(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
                      AdamState& state, const AdamConfig& config);

struct DpOptimizerConfig {
  AdamConfig adam;
  double clip_norm = 1.0;
  double noise_multiplier = 0.0;
  int batch_size = 100;

  absl::Status Check() const;
};

// softmax((logits + g) / tau) with g ~ Gumbel(0, 1).
absl::StatusOr<std::vector<double>> GumbelSoftmax(
    std::span<const double> logits, double temperature, std::mt19937_64& rng);

// Same transform with caller-supplied Gumbel noise.
std::vector<double> GumbelSoftmaxWithNoise(std::span<const double> logits,
                                           std::span<const double> gumbel,
                                           double temperature);

// d loss / d logits given the forward output and d loss / d output.
std::vector<double> GumbelSoftmaxBackward(std::span<const double> probs,
                                          std::span<const double> grad,
                                          double temperature);

double SampleGumbel(std::mt19937_64& rng);

}  // namespace synthbench

#endif  // SYNTHBENCH_NN_H_
