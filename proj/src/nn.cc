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

#include "synthbench/nn.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"

namespace synthbench {
namespace {

void ApplyActivation(Activation act, const Eigen::MatrixXd& pre,
                     Eigen::MatrixXd& out) {
  switch (act) {
    case Activation::kIdentity:
      out = pre;
      break;
    case Activation::kLeakyRelu:
      out = pre.unaryExpr([](double z) { return z > 0 ? z : kLeakySlope * z; });
      break;
    case Activation::kSigmoid:
      out = pre.unaryExpr([](double z) { return 1.0 / (1.0 + std::exp(-z)); });
      break;
  }
}

// Multiplies `grad` in place by the activation derivative at `pre`.
void ScaleByDerivative(Activation act, const Eigen::MatrixXd& pre,
                       Eigen::MatrixXd& grad) {
  switch (act) {
    case Activation::kIdentity:
      break;
    case Activation::kLeakyRelu:
      grad.array() *=
          pre.unaryExpr([](double z) { return z > 0 ? 1.0 : kLeakySlope; })
              .array();
      break;
    case Activation::kSigmoid:
      grad.array() *= pre.unaryExpr([](double z) {
                           const double s = 1.0 / (1.0 + std::exp(-z));
                           return s * (1.0 - s);
                         }).array();
      break;
  }
}

absl::Status CheckCache(const Mlp& net, const Activations& acts,
                        const Eigen::MatrixXd& output_grad) {
  if (acts.net_version != net.version() ||
      acts.pre.size() != net.layers().size()) {
    return absl::FailedPreconditionError(
        "stale activation cache: network changed since the forward pass");
  }
  if (output_grad.rows() != acts.output.rows() ||
      output_grad.cols() != acts.output.cols()) {
    return absl::InvalidArgumentError("loss gradient shape mismatch");
  }
  return absl::OkStatus();
}

// Per-layer deltas (d loss / d pre-activation), last layer first computed.
std::vector<Eigen::MatrixXd> Deltas(const Mlp& net, const Activations& acts,
                                    const Eigen::MatrixXd& output_grad) {
  const auto& layers = net.layers();
  const int n_layers = static_cast<int>(layers.size());
  std::vector<Eigen::MatrixXd> deltas(n_layers);
  Eigen::MatrixXd grad = output_grad;
  for (int l = n_layers - 1; l >= 0; --l) {
    if (acts.masks[l].size() > 0) grad.array() *= acts.masks[l].array();
    ScaleByDerivative(layers[l].activation, acts.pre[l], grad);
    deltas[l] = grad;
    if (l > 0) grad = deltas[l] * net.weight(l);
  }
  return deltas;
}

}  // namespace

absl::StatusOr<Mlp> Mlp::Create(int input_dim,
                                std::span<const LayerConfig> layers,
                                uint64_t seed) {
  absl::StatusOr<Mlp> net =
      FromParameters(input_dim, layers, Eigen::VectorXd());
  if (!net.ok()) return net.status();
  std::mt19937_64 rng(seed);
  for (const LayerShape& s : net->layers_) {
    const double limit = std::sqrt(6.0 / (s.in + s.out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (int k = 0; k < s.in * s.out; ++k) {
      net->params_[s.weight_offset + k] = dist(rng);
    }
  }
  return net;
}

absl::StatusOr<Mlp> Mlp::FromParameters(int input_dim,
                                        std::span<const LayerConfig> layers,
                                        Eigen::VectorXd parameters) {
  if (input_dim <= 0 || layers.empty()) {
    return absl::InvalidArgumentError("network needs input and layers");
  }
  Mlp net;
  net.input_dim_ = input_dim;
  int in = input_dim;
  int offset = 0;
  for (const LayerConfig& c : layers) {
    if (c.units <= 0 || c.dropout < 0.0 || c.dropout >= 1.0) {
      return absl::InvalidArgumentError("bad layer configuration");
    }
    LayerShape s{in, c.units, offset, offset + in * c.units, c.activation,
                 c.dropout};
    offset = s.bias_offset + c.units;
    net.layers_.push_back(s);
    in = c.units;
  }
  if (parameters.size() == 0) {
    net.params_ = Eigen::VectorXd::Zero(offset);
  } else if (parameters.size() == offset) {
    net.params_ = std::move(parameters);
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("expected ", offset, " parameters, got ",
                     parameters.size()));
  }
  return net;
}

std::vector<LayerConfig> Mlp::layer_configs() const {
  std::vector<LayerConfig> out;
  for (const LayerShape& s : layers_) {
    out.push_back({s.out, s.activation, s.dropout});
  }
  return out;
}

Eigen::Map<const Eigen::MatrixXd> Mlp::weight(int layer) const {
  const LayerShape& s = layers_[layer];
  return Eigen::Map<const Eigen::MatrixXd>(params_.data() + s.weight_offset,
                                           s.out, s.in);
}

Eigen::Map<const Eigen::VectorXd> Mlp::bias(int layer) const {
  const LayerShape& s = layers_[layer];
  return Eigen::Map<const Eigen::VectorXd>(params_.data() + s.bias_offset,
                                           s.out);
}

absl::StatusOr<Activations> Forward(const Mlp& net,
                                    const Eigen::MatrixXd& batch, Mode mode,
                                    std::mt19937_64& rng) {
  if (batch.cols() != net.input_dim()) {
    return absl::InvalidArgumentError(
        absl::StrCat("input width ", batch.cols(), " does not match network "
                     "input ", net.input_dim()));
  }
  const auto& layers = net.layers();
  Activations acts;
  acts.mode = mode;
  acts.net_version = net.version();
  acts.inputs.resize(layers.size());
  acts.pre.resize(layers.size());
  acts.masks.resize(layers.size());
  Eigen::MatrixXd current = batch;
  for (size_t l = 0; l < layers.size(); ++l) {
    const LayerShape& s = layers[l];
    acts.inputs[l] = std::move(current);
    acts.pre[l].noalias() = acts.inputs[l] * net.weight(l).transpose();
    acts.pre[l].rowwise() += net.bias(l).transpose();
    ApplyActivation(s.activation, acts.pre[l], current);
    if (mode == Mode::kTraining && s.dropout > 0.0) {
      std::bernoulli_distribution keep(1.0 - s.dropout);
      const double scale = 1.0 / (1.0 - s.dropout);
      Eigen::MatrixXd mask(current.rows(), current.cols());
      for (Eigen::Index c = 0; c < mask.cols(); ++c) {
        for (Eigen::Index r = 0; r < mask.rows(); ++r) {
          mask(r, c) = keep(rng) ? scale : 0.0;
        }
      }
      current.array() *= mask.array();
      acts.masks[l] = std::move(mask);
    }
  }
  acts.output = std::move(current);
  return acts;
}

absl::StatusOr<BatchGradient> BackwardBatch(
    const Mlp& net, const Activations& acts,
    const Eigen::MatrixXd& output_grad) {
  if (absl::Status s = CheckCache(net, acts, output_grad); !s.ok()) return s;
  std::vector<Eigen::MatrixXd> deltas = Deltas(net, acts, output_grad);
  BatchGradient out;
  out.parameters = Eigen::VectorXd::Zero(net.num_parameters());
  const auto& layers = net.layers();
  for (size_t l = 0; l < layers.size(); ++l) {
    const LayerShape& s = layers[l];
    Eigen::Map<Eigen::MatrixXd> gw(out.parameters.data() + s.weight_offset,
                                   s.out, s.in);
    gw.noalias() = deltas[l].transpose() * acts.inputs[l];
    out.parameters.segment(s.bias_offset, s.out) =
        deltas[l].colwise().sum().transpose();
  }
  out.inputs = deltas[0] * net.weight(0);
  return out;
}

absl::StatusOr<Eigen::MatrixXd> BackwardPerExample(
    const Mlp& net, const Activations& acts,
    const Eigen::MatrixXd& output_grad) {
  if (acts.mode != Mode::kTraining) {
    return absl::FailedPreconditionError(
        "per-example gradients need a training-mode forward pass");
  }
  if (absl::Status s = CheckCache(net, acts, output_grad); !s.ok()) return s;
  std::vector<Eigen::MatrixXd> deltas = Deltas(net, acts, output_grad);
  const Eigen::Index batch = output_grad.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(net.num_parameters(), batch);
  const auto& layers = net.layers();
  for (Eigen::Index i = 0; i < batch; ++i) {
    for (size_t l = 0; l < layers.size(); ++l) {
      const LayerShape& s = layers[l];
      Eigen::Map<Eigen::MatrixXd> gw(out.col(i).data() + s.weight_offset,
                                     s.out, s.in);
      gw.noalias() =
          deltas[l].row(i).transpose() * acts.inputs[l].row(i);
      out.col(i).segment(s.bias_offset, s.out) = deltas[l].row(i).transpose();
    }
  }
  return out;
}

absl::StatusOr<ClippedGradient> ClippedGradientSum(
    const Mlp& net, const Activations& acts, const Eigen::MatrixXd& output_grad,
    std::span<const int> example_of_row, int num_examples, double clip_norm) {
  if (absl::Status s = CheckCache(net, acts, output_grad); !s.ok()) return s;
  if (!(clip_norm > 0.0)) {
    return absl::InvalidArgumentError("clip norm must be positive");
  }
  if (static_cast<Eigen::Index>(example_of_row.size()) != output_grad.rows()) {
    return absl::InvalidArgumentError("example map does not cover the batch");
  }
  std::vector<std::vector<int>> members(num_examples);
  for (size_t r = 0; r < example_of_row.size(); ++r) {
    const int e = example_of_row[r];
    if (e < 0 || e >= num_examples) {
      return absl::InvalidArgumentError("example index out of range");
    }
    members[e].push_back(static_cast<int>(r));
  }
  std::vector<Eigen::MatrixXd> deltas = Deltas(net, acts, output_grad);
  const auto& layers = net.layers();

  // ||sum_r a_r d_r^T||_F^2 = sum_{r,s} (a_r . a_s)(d_r . d_s), plus the bias
  // term ||sum_r d_r||^2.
  std::vector<double> sq(num_examples, 0.0);
  for (size_t l = 0; l < layers.size(); ++l) {
    const Eigen::MatrixXd& a = acts.inputs[l];
    const Eigen::MatrixXd& d = deltas[l];
    for (int e = 0; e < num_examples; ++e) {
      const std::vector<int>& rows = members[e];
      for (size_t i = 0; i < rows.size(); ++i) {
        for (size_t j = 0; j < rows.size(); ++j) {
          const double dd = d.row(rows[i]).dot(d.row(rows[j]));
          const double aa = a.row(rows[i]).dot(a.row(rows[j]));
          sq[e] += aa * dd + dd;
        }
      }
    }
  }
  ClippedGradient out;
  out.norms.resize(num_examples);
  Eigen::VectorXd row_scale(output_grad.rows());
  for (int e = 0; e < num_examples; ++e) {
    const double norm = std::sqrt(sq[e]);
    out.norms[e] = norm;
    const double factor = norm > clip_norm ? clip_norm / norm : 1.0;
    for (int r : members[e]) row_scale[r] = factor;
  }
  out.sum = Eigen::VectorXd::Zero(net.num_parameters());
  for (size_t l = 0; l < layers.size(); ++l) {
    const LayerShape& s = layers[l];
    const Eigen::MatrixXd scaled = row_scale.asDiagonal() * deltas[l];
    Eigen::Map<Eigen::MatrixXd> gw(out.sum.data() + s.weight_offset, s.out,
                                   s.in);
    gw.noalias() = scaled.transpose() * acts.inputs[l];
    out.sum.segment(s.bias_offset, s.out) = scaled.colwise().sum().transpose();
  }
  return out;
}

Eigen::VectorXd NoisyMean(const Eigen::VectorXd& clipped_sum, int batch_size,
                          double clip_norm, double noise_multiplier,
                          std::mt19937_64& rng) {
  Eigen::VectorXd out = clipped_sum / static_cast<double>(batch_size);
  if (noise_multiplier > 0.0) {
    std::normal_distribution<double> noise(
        0.0, noise_multiplier * clip_norm / batch_size);
    for (Eigen::Index k = 0; k < out.size(); ++k) out[k] += noise(rng);
  }
  return out;
}

Eigen::VectorXd ClipNoiseAggregate(const Eigen::MatrixXd& per_example,
                                   double clip_norm, double noise_multiplier,
                                   std::mt19937_64& rng) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(per_example.rows());
  for (Eigen::Index i = 0; i < per_example.cols(); ++i) {
    const double norm = per_example.col(i).norm();
    const double factor = norm > clip_norm ? clip_norm / norm : 1.0;
    sum += factor * per_example.col(i);
  }
  return NoisyMean(sum, static_cast<int>(per_example.cols()), clip_norm,
                   noise_multiplier, rng);
}

absl::Status AdamStep(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
                      AdamState& state, const AdamConfig& config) {
  if (grad.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    return absl::InvalidArgumentError("optimizer state dimension mismatch");
  }
  ++state.t;
  state.m = config.beta1 * state.m + (1.0 - config.beta1) * grad;
  state.v = config.beta2 * state.v +
            (1.0 - config.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));
  params.array() -= config.learning_rate * (state.m.array() / c1) /
                    ((state.v.array() / c2).sqrt() + config.epsilon);
  return absl::OkStatus();
}

absl::Status DpOptimizerConfig::Check() const {
  if (!(adam.beta1 > 0.0 && adam.beta1 < 1.0 && adam.beta2 > 0.0 &&
        adam.beta2 < 1.0)) {
    return absl::InvalidArgumentError("Adam decay rates must lie in (0, 1)");
  }
  if (!(clip_norm > 0.0) || noise_multiplier < 0.0 || batch_size <= 0 ||
      !(adam.learning_rate > 0.0)) {
    return absl::InvalidArgumentError("bad DP optimizer configuration");
  }
  return absl::OkStatus();
}

double SampleGumbel(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  double u = uniform(rng);
  while (u <= 0.0) u = uniform(rng);
  return -std::log(-std::log(u));
}

std::vector<double> GumbelSoftmaxWithNoise(std::span<const double> logits,
                                           std::span<const double> gumbel,
                                           double temperature) {
  std::vector<double> out(logits.size());
  double hi = -std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < logits.size(); ++k) {
    out[k] = (logits[k] + gumbel[k]) / temperature;
    hi = std::max(hi, out[k]);
  }
  double total = 0.0;
  for (double& v : out) {
    v = std::exp(v - hi);
    total += v;
  }
  for (double& v : out) v /= total;
  return out;
}

absl::StatusOr<std::vector<double>> GumbelSoftmax(
    std::span<const double> logits, double temperature, std::mt19937_64& rng) {
  if (!(temperature > 0.0)) {
    return absl::InvalidArgumentError("temperature must be positive");
  }
  std::vector<double> gumbel(logits.size());
  for (double& g : gumbel) g = SampleGumbel(rng);
  return GumbelSoftmaxWithNoise(logits, gumbel, temperature);
}

std::vector<double> GumbelSoftmaxBackward(std::span<const double> probs,
                                          std::span<const double> grad,
                                          double temperature) {
  double inner = 0.0;
  for (size_t k = 0; k < probs.size(); ++k) inner += probs[k] * grad[k];
  std::vector<double> out(probs.size());
  for (size_t k = 0; k < probs.size(); ++k) {
    out[k] = probs[k] * (grad[k] - inner) / temperature;
  }
  return out;
}

}  // namespace synthbench
