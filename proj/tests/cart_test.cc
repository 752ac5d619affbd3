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
#include <numeric>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "oracles/oracles.h"
#include "synthbench/metrics.h"
#include "test_util.h"

namespace synthbench {
namespace {

struct Problem {
  std::vector<std::vector<double>> features;
  std::vector<ColumnKind> kinds;
  std::vector<uint8_t> labels;
};

// Two continuous features and one 4-level categorical; the label depends on
// all three so every kind of split gets exercised.
Problem Mixed(int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> level(0, 3);
  std::uniform_real_distribution<double> u;
  Problem p;
  p.features.assign(3, std::vector<double>(n));
  p.kinds = {ColumnKind::Continuous(), ColumnKind::Continuous(),
             ColumnKind::Categorical(4)};
  p.labels.resize(n);
  const double effect[4] = {-1.0, 0.8, 0.0, 1.5};
  for (int i = 0; i < n; ++i) {
    p.features[0][i] = normal(rng);
    p.features[1][i] = normal(rng);
    const int l = level(rng);
    p.features[2][i] = l;
    const double z = 1.2 * p.features[0][i] - 0.7 * p.features[1][i] + effect[l];
    p.labels[i] = u(rng) < 1.0 / (1.0 + std::exp(-z));
  }
  return p;
}

bool Left(const CartNode& node, const ColumnKind& kind, double v) {
  if (kind.type == ColumnType::kCategorical) {
    return (node.left_levels >> static_cast<int>(v)) & 1u;
  }
  return v <= node.threshold;
}

// Rows reaching each node.
std::vector<std::vector<int>> Route(const CartTree& tree, const Problem& p) {
  std::vector<std::vector<int>> at(tree.nodes.size());
  for (int i = 0; i < static_cast<int>(p.labels.size()); ++i) {
    int k = 0;
    at[k].push_back(i);
    while (tree.nodes[k].feature >= 0) {
      const CartNode& node = tree.nodes[k];
      k = Left(node, p.kinds[node.feature], p.features[node.feature][i])
              ? node.left
              : node.right;
      at[k].push_back(i);
    }
  }
  return at;
}

double Gini(const Problem& p, const std::vector<int>& rows) {
  if (rows.empty()) return 0.0;
  double ones = 0.0;
  for (int r : rows) ones += p.labels[r];
  const double q = ones / rows.size();
  return rows.size() * 2.0 * q * (1.0 - q);
}

double SplitGain(const Problem& p, const CartNode& node,
                 const std::vector<int>& rows) {
  std::vector<int> left, right;
  for (int r : rows) {
    (Left(node, p.kinds[node.feature], p.features[node.feature][r]) ? left
                                                                     : right)
        .push_back(r);
  }
  return Gini(p, rows) - Gini(p, left) - Gini(p, right);
}

std::vector<double> Row(const Problem& p, int i) {
  std::vector<double> row;
  for (const auto& f : p.features) row.push_back(f[i]);
  return row;
}

TEST(CartTest, SeparableDataGivesPureLeaves) {
  Problem p;
  p.kinds = {ColumnKind::Continuous()};
  p.features.assign(1, {});
  for (int i = 0; i < 100; ++i) {
    p.features[0].push_back(i);
    p.labels.push_back(i >= 50);
  }
  CartConfig config;
  config.min_leaf = 5;
  ASSERT_OK_AND_ASSIGN(CartTree tree,
                       CartFit(p.features, p.kinds, p.labels, config));
  ASSERT_EQ(tree.nodes.size(), 3u);
  EXPECT_EQ(tree.nodes[0].feature, 0);
  EXPECT_DOUBLE_EQ(tree.nodes[0].threshold, 49.5);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(tree.Predict(Row(p, i)), p.labels[i]);
  }
}

TEST(CartTest, ConstantLabelsGiveARootLeaf) {
  Problem p = Mixed(100, 1);
  std::fill(p.labels.begin(), p.labels.end(), 1);
  ASSERT_OK_AND_ASSIGN(CartTree tree,
                       CartFit(p.features, p.kinds, p.labels, CartConfig{}));
  ASSERT_EQ(tree.nodes.size(), 1u);
  EXPECT_EQ(tree.nodes[0].probability, 1.0);
  EXPECT_EQ(tree.num_leaves(), 1);
  EXPECT_EQ(tree.depth(), 0);
}

TEST(CartTest, ConstantFeaturesGiveARootLeaf) {
  Problem p = Mixed(100, 2);
  for (auto& f : p.features) std::fill(f.begin(), f.end(), 1.0);
  ASSERT_OK_AND_ASSIGN(CartTree tree,
                       CartFit(p.features, p.kinds, p.labels, CartConfig{}));
  ASSERT_EQ(tree.nodes.size(), 1u);
  const double ones = std::accumulate(p.labels.begin(), p.labels.end(), 0.0);
  EXPECT_DOUBLE_EQ(tree.nodes[0].probability, ones / 100.0);
}

TEST(CartTest, EveryNodeMatchesExhaustiveSearch) {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const Problem p = Mixed(200, 100 + seed);
    CartConfig config;
    config.min_leaf = 7;
    config.max_depth = 6;
    ASSERT_OK_AND_ASSIGN(CartTree tree,
                         CartFit(p.features, p.kinds, p.labels, config));
    const std::vector<std::vector<int>> at = Route(tree, p);
    std::vector<int> depth(tree.nodes.size(), 0);
    int checked = 0;
    for (size_t k = 0; k < tree.nodes.size(); ++k) {
      const CartNode& node = tree.nodes[k];
      ASSERT_EQ(node.count, static_cast<int64_t>(at[k].size()));
      if (node.feature >= 0) {
        depth[node.left] = depth[node.right] = depth[k] + 1;
      }
      int ones = 0;
      for (int r : at[k]) ones += p.labels[r];
      EXPECT_DOUBLE_EQ(node.probability,
                       static_cast<double>(ones) / at[k].size());
      const bool can_split = depth[k] < config.max_depth && ones > 0 &&
                             ones < static_cast<int>(at[k].size()) &&
                             static_cast<int>(at[k].size()) >= 2 * config.min_leaf;
      const oracle::SplitChoice want = oracle::BestSplit(
          p.features, p.kinds, p.labels, at[k], config.min_leaf);
      if (!can_split || !want.found || want.gain <= 1e-9) {
        EXPECT_EQ(node.feature, -1) << "seed " << seed << " node " << k;
        continue;
      }
      ASSERT_GE(node.feature, 0) << "seed " << seed << " node " << k;
      EXPECT_NEAR(SplitGain(p, node, at[k]), want.gain, 1e-9 * want.gain)
          << "seed " << seed << " node " << k;
      EXPECT_EQ(node.feature, want.feature) << "seed " << seed << " node " << k;
      EXPECT_EQ(node.threshold, want.threshold);
      EXPECT_EQ(node.left_levels, want.left_levels);
      ++checked;
    }
    EXPECT_GT(checked, 5);
  }
}

TEST(CartTest, RowOrderDoesNotMatter) {
  const Problem p = Mixed(300, 3);
  std::vector<int> perm(300);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(4));
  Problem q = p;
  for (int i = 0; i < 300; ++i) {
    for (int f = 0; f < 3; ++f) q.features[f][i] = p.features[f][perm[i]];
    q.labels[i] = p.labels[perm[i]];
  }
  CartConfig config;
  config.min_leaf = 5;
  ASSERT_OK_AND_ASSIGN(CartTree a, CartFit(p.features, p.kinds, p.labels, config));
  ASSERT_OK_AND_ASSIGN(CartTree b, CartFit(q.features, q.kinds, q.labels, config));
  ASSERT_EQ(a.nodes.size(), b.nodes.size());
  for (int i = 0; i < 300; ++i) {
    EXPECT_EQ(a.Predict(Row(p, i)), b.Predict(Row(p, i)));
  }
}

TEST(CartTest, RespectsMinLeafAndDepth) {
  const Problem p = Mixed(2000, 5);
  CartConfig config;
  config.min_leaf = 37;
  config.max_depth = 4;
  ASSERT_OK_AND_ASSIGN(CartTree tree,
                       CartFit(p.features, p.kinds, p.labels, config));
  EXPECT_LE(tree.depth(), 4);
  EXPECT_GT(tree.num_leaves(), 1);
  for (const CartNode& node : tree.nodes) {
    EXPECT_GE(node.count, 37);
    EXPECT_GE(node.probability, 0.0);
    EXPECT_LE(node.probability, 1.0);
  }
}

TEST(CartTest, FittedValuesAreLeafProbabilities) {
  const Problem p = Mixed(500, 6);
  ASSERT_OK_AND_ASSIGN(CartFitter fitter,
                       CartFitter::Create(p.features, p.kinds, CartConfig{}));
  std::vector<double> fitted;
  ASSERT_OK_AND_ASSIGN(CartTree tree, fitter.Fit(p.labels, &fitted));
  ASSERT_EQ(fitted.size(), 500u);
  for (int i = 0; i < 500; ++i) {
    EXPECT_EQ(fitted[i], tree.Predict(Row(p, i)));
  }
  // Refitting the same fitter with other labels works.
  std::vector<uint8_t> flipped = p.labels;
  for (uint8_t& y : flipped) y = 1 - y;
  ASSERT_OK_AND_ASSIGN(CartTree other, fitter.Fit(flipped));
  EXPECT_NEAR(other.nodes[0].probability, 1.0 - tree.nodes[0].probability,
              1e-12);
}

TEST(CartTest, ComplexityPrunesWeakSplits) {
  const Problem p = Mixed(1000, 7);
  CartConfig loose;
  CartConfig strict;
  strict.complexity = 0.05;
  ASSERT_OK_AND_ASSIGN(CartTree a, CartFit(p.features, p.kinds, p.labels, loose));
  ASSERT_OK_AND_ASSIGN(CartTree b, CartFit(p.features, p.kinds, p.labels, strict));
  EXPECT_LT(b.num_leaves(), a.num_leaves());
}

TEST(CartTest, ManyLevelsUseOrderedSearch) {
  // 20 levels, label 1 exactly for the odd levels: one ordered cut splits it.
  Problem p;
  p.kinds = {ColumnKind::Categorical(20)};
  p.features.assign(1, {});
  for (int i = 0; i < 400; ++i) {
    p.features[0].push_back(i % 20);
    p.labels.push_back((i % 20) % 2);
  }
  CartConfig config;
  config.min_leaf = 5;
  ASSERT_OK_AND_ASSIGN(CartTree tree,
                       CartFit(p.features, p.kinds, p.labels, config));
  ASSERT_EQ(tree.nodes.size(), 3u);
  EXPECT_EQ(tree.nodes[0].left_levels, 0x55555u);
}

TEST(CartTest, RejectsBadInput) {
  const Problem p = Mixed(100, 8);
  CartConfig config;
  config.min_leaf = 0;
  EXPECT_FALSE(CartFit(p.features, p.kinds, p.labels, config).ok());
  config = CartConfig{};
  config.min_leaf = 60;
  EXPECT_FALSE(CartFit(p.features, p.kinds, p.labels, config).ok());
  std::vector<std::vector<double>> bad = p.features;
  bad[2][0] = 4;
  EXPECT_FALSE(CartFit(bad, p.kinds, p.labels, CartConfig{}).ok());
  std::vector<uint8_t> labels = p.labels;
  labels[0] = 2;
  EXPECT_FALSE(CartFit(p.features, p.kinds, labels, CartConfig{}).ok());
  labels.pop_back();
  EXPECT_FALSE(CartFit(p.features, p.kinds, labels, CartConfig{}).ok());
}

}  // namespace
}  // namespace synthbench
