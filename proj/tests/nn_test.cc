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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "synthbench/nn.h"
#include "test_util.h"

namespace synthbench {
namespace {

Eigen::MatrixXd RandomMatrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = n(rng);
  }
  return m;
}

// Leaky ReLU (with dropout), sigmoid, identity.
const std::vector<LayerConfig> kThreeLayers = {
    {7, Activation::kLeakyRelu, 0.3},
    {5, Activation::kSigmoid, 0.0},
    {3, Activation::kIdentity, 0.0}};

Mlp ThreeLayerNet(uint64_t seed) {
  absl::StatusOr<Mlp> net = Mlp::Create(4, kThreeLayers, seed);
  Mlp out = *net;
  // Non-zero biases so their gradients are exercised.
  std::mt19937_64 rng(seed + 1);
  std::normal_distribution<double> n(0.0, 0.3);
  for (const LayerShape& s : out.layers()) {
    for (int k = 0; k < s.out; ++k) {
      out.mutable_parameters()[s.bias_offset + k] = n(rng);
    }
  }
  return out;
}

TEST(ForwardTest, IdentityLayerPassesInputThrough) {
  const std::vector<LayerConfig> layers = {{3, Activation::kIdentity, 0.0}};
  Eigen::VectorXd params = Eigen::VectorXd::Zero(12);
  Eigen::Map<Eigen::MatrixXd>(params.data(), 3, 3).setIdentity();
  ASSERT_OK_AND_ASSIGN(Mlp net, Mlp::FromParameters(3, layers, params));
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd x = RandomMatrix(4, 3, rng);
  ASSERT_OK_AND_ASSIGN(Activations a, Forward(net, x, Mode::kEvaluation, rng));
  EXPECT_EQ(a.output, x);
}

TEST(ForwardTest, MatchesLoopOracle) {
  const Mlp net = ThreeLayerNet(3);
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd x = RandomMatrix(6, 4, rng);
  ASSERT_OK_AND_ASSIGN(Activations a, Forward(net, x, Mode::kEvaluation, rng));
  const Eigen::VectorXd& p = net.parameters();
  for (int i = 0; i < x.rows(); ++i) {
    std::vector<double> h;
    for (int c = 0; c < x.cols(); ++c) h.push_back(x(i, c));
    for (const LayerShape& s : net.layers()) {
      std::vector<double> next(s.out);
      for (int o = 0; o < s.out; ++o) {
        double z = p[s.bias_offset + o];
        for (int k = 0; k < s.in; ++k) {
          z += p[s.weight_offset + k * s.out + o] * h[k];
        }
        switch (s.activation) {
          case Activation::kIdentity:
            next[o] = z;
            break;
          case Activation::kLeakyRelu:
            next[o] = z > 0 ? z : 0.2 * z;
            break;
          case Activation::kSigmoid:
            next[o] = 1.0 / (1.0 + std::exp(-z));
            break;
        }
      }
      h = next;
    }
    for (int o = 0; o < 3; ++o) EXPECT_NEAR(a.output(i, o), h[o], 1e-12);
  }
}

TEST(ForwardTest, RejectsWrongWidth) {
  const Mlp net = ThreeLayerNet(3);
  std::mt19937_64 rng(2);
  EXPECT_FALSE(
      Forward(net, Eigen::MatrixXd::Zero(2, 5), Mode::kEvaluation, rng).ok());
}

TEST(ForwardTest, DropoutOnlyInTraining) {
  const Mlp net = ThreeLayerNet(3);
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd x = RandomMatrix(50, 4, rng);
  ASSERT_OK_AND_ASSIGN(Activations eval, Forward(net, x, Mode::kEvaluation, rng));
  EXPECT_EQ(eval.masks[0].size(), 0);
  ASSERT_OK_AND_ASSIGN(Activations train, Forward(net, x, Mode::kTraining, rng));
  ASSERT_EQ(train.masks[0].rows(), 50);
  const double kept = (train.masks[0].array() > 0).cast<double>().mean();
  EXPECT_NEAR(kept, 0.7, 0.1);
  EXPECT_NEAR(train.masks[0].maxCoeff(), 1.0 / 0.7, 1e-15);
}

// Loss of example i: sum_k c(i, k) * output(i, k).
std::vector<double> ExampleLosses(const Mlp& net, const Eigen::MatrixXd& x,
                                  const Eigen::MatrixXd& c, uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Activations a = *Forward(net, x, Mode::kTraining, rng);
  std::vector<double> out(x.rows());
  for (int i = 0; i < x.rows(); ++i) out[i] = a.output.row(i).dot(c.row(i));
  return out;
}

TEST(BackwardTest, PerExampleGradientsMatchCentralDifferences) {
  Mlp net = ThreeLayerNet(11);
  std::mt19937_64 data_rng(5);
  const Eigen::MatrixXd x = RandomMatrix(5, 4, data_rng);
  const Eigen::MatrixXd c = RandomMatrix(5, 3, data_rng);
  const uint64_t mask_seed = 99;
  std::mt19937_64 rng(mask_seed);
  ASSERT_OK_AND_ASSIGN(Activations a, Forward(net, x, Mode::kTraining, rng));
  ASSERT_OK_AND_ASSIGN(Eigen::MatrixXd grads, BackwardPerExample(net, a, c));

  const double h = 1e-6;
  Eigen::MatrixXd numeric(net.num_parameters(), 5);
  for (int k = 0; k < net.num_parameters(); ++k) {
    Mlp plus = net;
    plus.mutable_parameters()[k] += h;
    Mlp minus = net;
    minus.mutable_parameters()[k] -= h;
    const std::vector<double> lp = ExampleLosses(plus, x, c, mask_seed);
    const std::vector<double> lm = ExampleLosses(minus, x, c, mask_seed);
    for (int i = 0; i < 5; ++i) numeric(k, i) = (lp[i] - lm[i]) / (2 * h);
  }
  for (int i = 0; i < 5; ++i) {
    for (size_t l = 0; l < net.layers().size(); ++l) {
      const LayerShape& s = net.layers()[l];
      const int len = s.bias_offset + s.out - s.weight_offset;
      const Eigen::VectorXd an = grads.col(i).segment(s.weight_offset, len);
      const Eigen::VectorXd fd = numeric.col(i).segment(s.weight_offset, len);
      const double scale = std::max(an.norm(), fd.norm());
      ASSERT_GT(scale, 0.0);
      EXPECT_LT((an - fd).norm() / scale, 1e-4)
          << "example " << i << " layer " << l;
    }
  }
}

TEST(BackwardTest, InputGradientMatchesCentralDifferences) {
  const Mlp net = ThreeLayerNet(12);
  std::mt19937_64 data_rng(6);
  const Eigen::MatrixXd x = RandomMatrix(5, 4, data_rng);
  const Eigen::MatrixXd c = RandomMatrix(5, 3, data_rng);
  std::mt19937_64 rng(7);
  ASSERT_OK_AND_ASSIGN(Activations a, Forward(net, x, Mode::kTraining, rng));
  ASSERT_OK_AND_ASSIGN(BatchGradient g, BackwardBatch(net, a, c));
  const double h = 1e-6;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 4; ++j) {
      Eigen::MatrixXd xp = x, xm = x;
      xp(i, j) += h;
      xm(i, j) -= h;
      const double fd = (ExampleLosses(net, xp, c, 7)[i] -
                         ExampleLosses(net, xm, c, 7)[i]) /
                        (2 * h);
      EXPECT_NEAR(g.inputs(i, j), fd, 1e-4 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(BackwardTest, BatchGradientIsSumOfPerExample) {
  const Mlp net = ThreeLayerNet(13);
  std::mt19937_64 rng(8);
  const Eigen::MatrixXd x = RandomMatrix(9, 4, rng);
  const Eigen::MatrixXd c = RandomMatrix(9, 3, rng);
  ASSERT_OK_AND_ASSIGN(Activations a, Forward(net, x, Mode::kTraining, rng));
  ASSERT_OK_AND_ASSIGN(BatchGradient g, BackwardBatch(net, a, c));
  ASSERT_OK_AND_ASSIGN(Eigen::MatrixXd per, BackwardPerExample(net, a, c));
  EXPECT_LT((per.rowwise().sum() - g.parameters).norm(), 1e-12);
}

TEST(BackwardTest, ZeroLossGradientGivesZeros) {
  const Mlp net = ThreeLayerNet(14);
  std::mt19937_64 rng(8);
  const Eigen::MatrixXd x = RandomMatrix(4, 4, rng);
  ASSERT_OK_AND_ASSIGN(Activations a, Forward(net, x, Mode::kTraining, rng));
  ASSERT_OK_AND_ASSIGN(Eigen::MatrixXd per,
                       BackwardPerExample(net, a, Eigen::MatrixXd::Zero(4, 3)));
  EXPECT_EQ(per.cwiseAbs().maxCoeff(), 0.0);
}

TEST(BackwardTest, StaleCacheIsRejected) {
  Mlp net = ThreeLayerNet(15);
  std::mt19937_64 rng(8);
  const Eigen::MatrixXd x = RandomMatrix(4, 4, rng);
  ASSERT_OK_AND_ASSIGN(Activations a, Forward(net, x, Mode::kTraining, rng));
  net.mutable_parameters()[0] += 1.0;
  const absl::StatusOr<BatchGradient> g =
      BackwardBatch(net, a, Eigen::MatrixXd::Ones(4, 3));
  EXPECT_EQ(g.status().code(), absl::StatusCode::kFailedPrecondition);
}

TEST(BackwardTest, PerExampleNeedsTrainingMode) {
  const Mlp net = ThreeLayerNet(15);
  std::mt19937_64 rng(8);
  ASSERT_OK_AND_ASSIGN(Activations a, Forward(net, RandomMatrix(2, 4, rng),
                                              Mode::kEvaluation, rng));
  EXPECT_FALSE(BackwardPerExample(net, a, Eigen::MatrixXd::Ones(2, 3)).ok());
}

TEST(ClipTest, ClippedSumMatchesExplicitClipping) {
  const Mlp net = ThreeLayerNet(16);
  std::mt19937_64 rng(9);
  const Eigen::MatrixXd x = RandomMatrix(8, 4, rng);
  const Eigen::MatrixXd c = 3.0 * RandomMatrix(8, 3, rng);
  ASSERT_OK_AND_ASSIGN(Activations a, Forward(net, x, Mode::kTraining, rng));
  // Rows r and r + 4 belong to example r.
  const std::vector<int> example_of_row = {0, 1, 2, 3, 0, 1, 2, 3};
  const double clip = 0.5;
  ASSERT_OK_AND_ASSIGN(ClippedGradient got,
                       ClippedGradientSum(net, a, c, example_of_row, 4, clip));
  ASSERT_OK_AND_ASSIGN(Eigen::MatrixXd per, BackwardPerExample(net, a, c));
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(net.num_parameters());
  int clipped = 0;
  for (int e = 0; e < 4; ++e) {
    const Eigen::VectorXd g = per.col(e) + per.col(e + 4);
    EXPECT_NEAR(got.norms[e], g.norm(), 1e-10 * g.norm());
    const double factor = std::min(1.0, clip / g.norm());
    clipped += factor < 1.0;
    expected += factor * g;
  }
  EXPECT_GT(clipped, 0);
  EXPECT_LT((got.sum - expected).norm(), 1e-10);
}

TEST(ClipTest, RejectsBadExampleMap) {
  const Mlp net = ThreeLayerNet(16);
  std::mt19937_64 rng(9);
  ASSERT_OK_AND_ASSIGN(Activations a, Forward(net, RandomMatrix(2, 4, rng),
                                              Mode::kTraining, rng));
  const std::vector<int> bad = {0, 2};
  EXPECT_FALSE(
      ClippedGradientSum(net, a, Eigen::MatrixXd::Ones(2, 3), bad, 2, 1.0).ok());
  const std::vector<int> ok = {0, 1};
  EXPECT_FALSE(
      ClippedGradientSum(net, a, Eigen::MatrixXd::Ones(2, 3), ok, 2, 0.0).ok());
}

TEST(ClipNoiseAggregateTest, LargeGradientClippedToNormOne) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4, 1);
  g(0, 0) = 6.0;
  g(3, 0) = 8.0;
  std::mt19937_64 rng(1);
  const Eigen::VectorXd out = ClipNoiseAggregate(g, 1.0, 0.0, rng);
  EXPECT_NEAR(out.norm(), 1.0, 1e-15);
  EXPECT_NEAR(out(0), 0.6, 1e-15);
}

TEST(ClipNoiseAggregateTest, SmallGradientUnchanged) {
  Eigen::MatrixXd g(3, 1);
  g << 0.1, -0.2, 0.3;
  std::mt19937_64 rng(1);
  EXPECT_EQ(ClipNoiseAggregate(g, 1.0, 0.0, rng), g.col(0));
}

TEST(NoisyMeanTest, NoiseStandardDeviation) {
  const int b = 100;
  const double clip = 1.0;
  const double sigma = 2.2;
  std::mt19937_64 rng(31);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(10000);
  const Eigen::VectorXd noisy = NoisyMean(zero, b, clip, sigma, rng);
  const double mean = noisy.mean();
  const double sd =
      std::sqrt((noisy.array() - mean).square().sum() / (noisy.size() - 1));
  EXPECT_NEAR(sd / (sigma * clip / b), 1.0, 0.03);
}

TEST(AdamTest, ZeroGradientLeavesParameters) {
  Eigen::VectorXd p(3);
  p << 1, -2, 3;
  const Eigen::VectorXd before = p;
  AdamState state = AdamState::Zeros(3);
  ASSERT_OK(AdamStep(p, Eigen::VectorXd::Zero(3), state, AdamConfig{}));
  EXPECT_EQ(p, before);
}

TEST(AdamTest, FirstStepMovesAgainstSign) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(4);
  Eigen::VectorXd g(4);
  g << 3.0, -0.01, 1e-3, -50.0;
  AdamState state = AdamState::Zeros(4);
  const AdamConfig config;
  ASSERT_OK(AdamStep(p, g, state, config));
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(std::signbit(p(k)), !std::signbit(g(k)));
    EXPECT_NEAR(std::abs(p(k)), config.learning_rate, 1e-6);
  }
}

TEST(AdamTest, QuadraticBowlDecreases) {
  Eigen::VectorXd p(2);
  p << 3.0, -4.0;
  AdamState state = AdamState::Zeros(2);
  AdamConfig config;
  config.learning_rate = 0.05;
  std::vector<double> losses;
  for (int t = 0; t < 100; ++t) {
    losses.push_back(0.5 * p.squaredNorm());
    ASSERT_OK(AdamStep(p, p, state, config));
  }
  for (int t = 6; t < 100; ++t) EXPECT_LT(losses[t], losses[t - 1]) << t;
}

TEST(AdamTest, DimensionMismatch) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(2);
  AdamState state = AdamState::Zeros(3);
  EXPECT_FALSE(AdamStep(p, Eigen::VectorXd::Zero(2), state, AdamConfig{}).ok());
}

TEST(DpOptimizerConfigTest, Check) {
  EXPECT_OK(DpOptimizerConfig{}.Check());
  DpOptimizerConfig c;
  c.clip_norm = 0.0;
  EXPECT_FALSE(c.Check().ok());
  c = {};
  c.adam.beta1 = 1.0;
  EXPECT_FALSE(c.Check().ok());
}

TEST(GumbelSoftmaxTest, SumsToOne) {
  std::mt19937_64 rng(4);
  const std::vector<double> logits = {0.3, -1.0, 2.0, 0.0};
  for (int t = 0; t < 1000; ++t) {
    ASSERT_OK_AND_ASSIGN(std::vector<double> p, GumbelSoftmax(logits, 0.5, rng));
    double s = 0.0;
    for (double v : p) {
      EXPECT_GT(v, 0.0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(GumbelSoftmaxTest, UniformLogitsGiveUniformArgmax) {
  std::mt19937_64 rng(5);
  const std::vector<double> logits(4, 0.0);
  std::vector<int> hits(4, 0);
  const int draws = 100000;
  for (int t = 0; t < draws; ++t) {
    const std::vector<double> p = *GumbelSoftmax(logits, 1.0, rng);
    ++hits[std::max_element(p.begin(), p.end()) - p.begin()];
  }
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(hits[k] / double(draws), 0.25, 0.01);
}

TEST(GumbelSoftmaxTest, DominantLogitWins) {
  std::mt19937_64 rng(6);
  const std::vector<double> logits = {0.0, 50.0, 0.0};
  int wins = 0;
  const int draws = 10000;
  for (int t = 0; t < draws; ++t) {
    const std::vector<double> p = *GumbelSoftmax(logits, 0.1, rng);
    wins += std::max_element(p.begin(), p.end()) - p.begin() == 1;
  }
  EXPECT_GE(wins, 0.999 * draws);
}

TEST(GumbelSoftmaxTest, BackwardMatchesCentralDifferences) {
  const std::vector<double> logits = {0.4, -0.3, 1.1};
  const std::vector<double> noise = {0.2, 1.3, -0.5};
  const std::vector<double> w = {1.0, -2.0, 0.5};
  const double tau = 0.5;
  const std::vector<double> p = GumbelSoftmaxWithNoise(logits, noise, tau);
  const std::vector<double> g = GumbelSoftmaxBackward(p, w, tau);
  for (int k = 0; k < 3; ++k) {
    std::vector<double> lp = logits, lm = logits;
    lp[k] += 1e-6;
    lm[k] -= 1e-6;
    const std::vector<double> pp = GumbelSoftmaxWithNoise(lp, noise, tau);
    const std::vector<double> pm = GumbelSoftmaxWithNoise(lm, noise, tau);
    double fd = 0.0;
    for (int j = 0; j < 3; ++j) fd += w[j] * (pp[j] - pm[j]) / 2e-6;
    EXPECT_NEAR(g[k], fd, 1e-8);
  }
}

TEST(GumbelSoftmaxTest, RejectsNonPositiveTemperature) {
  std::mt19937_64 rng(1);
  EXPECT_FALSE(GumbelSoftmax(std::vector<double>{1, 2}, 0.0, rng).ok());
}

}  // namespace
}  // namespace synthbench
