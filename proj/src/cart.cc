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

// Breadth-first CART for binary labels.
//
// Every level is grown in one pass per feature: ordered features are swept in
// presorted order with per-node running counts, categorical features are
// tallied per node and level and then every level subset is scored. Gains are
// computed from integer counts only, so the tree does not depend on row order.

#include <algorithm>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "synthbench/metrics.h"

namespace synthbench {
namespace {

// Above this many levels subsets are not enumerated; levels are ordered by
// their positive rate instead, which is optimal for two-class Gini.
constexpr int kMaxEnumeratedLevels = 12;

// Count-weighted Gini impurity of a node: n * (1 - p0^2 - p1^2).
double Impurity(int64_t n0, int64_t n1) {
  const int64_t n = n0 + n1;
  if (n == 0) return 0.0;
  return 2.0 * static_cast<double>(n0) * static_cast<double>(n1) /
         static_cast<double>(n);
}

struct NodeStats {
  int64_t n0 = 0;
  int64_t n1 = 0;
  int depth = 0;
};

struct Candidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
  uint64_t left_levels = 0;
  int64_t left0 = 0;
  int64_t left1 = 0;
};

bool GoesLeft(const CartNode& node, const ColumnKind& kind, double value) {
  if (kind.type == ColumnType::kCategorical) {
    const int level = static_cast<int>(value);
    return level >= 0 && level < 64 && ((node.left_levels >> level) & 1u);
  }
  return value <= node.threshold;
}

}  // namespace

double CartTree::Predict(std::span<const double> row) const {
  int k = 0;
  while (nodes[k].feature >= 0) {
    const CartNode& node = nodes[k];
    k = GoesLeft(node, features[node.feature], row[node.feature]) ? node.left
                                                                  : node.right;
  }
  return nodes[k].probability;
}

int CartTree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int deepest = 0;
  for (size_t k = 0; k < nodes.size(); ++k) {
    if (nodes[k].feature < 0) continue;
    d[nodes[k].left] = d[nodes[k].right] = d[k] + 1;
    deepest = std::max(deepest, d[k] + 1);
  }
  return deepest;
}

int CartTree::num_leaves() const {
  return static_cast<int>(std::count_if(
      nodes.begin(), nodes.end(), [](const CartNode& n) {
        return n.feature < 0;
      }));
}

absl::StatusOr<CartFitter> CartFitter::Create(
    std::vector<std::vector<double>> features, std::vector<ColumnKind> kinds,
    CartConfig config) {
  if (features.size() != kinds.size() || features.empty()) {
    return absl::InvalidArgumentError(
        "cart: need one kind per feature and at least one feature");
  }
  if (config.max_depth < 0 || config.min_leaf < 1 || config.complexity < 0.0) {
    return absl::InvalidArgumentError("cart: bad configuration");
  }
  const int64_t n = static_cast<int64_t>(features.front().size());
  for (size_t f = 0; f < features.size(); ++f) {
    if (static_cast<int64_t>(features[f].size()) != n) {
      return absl::InvalidArgumentError("cart: ragged feature table");
    }
    if (kinds[f].type == ColumnType::kCategorical) {
      for (double v : features[f]) {
        if (!(v >= 0 && v < kinds[f].level_count)) {
          return absl::InvalidArgumentError(
              absl::StrCat("cart: feature ", f, " has level ", v,
                           " out of range"));
        }
      }
    }
  }
  if (n < 2 * static_cast<int64_t>(config.min_leaf)) {
    return absl::InvalidArgumentError(
        absl::StrCat("cart: ", n, " rows is fewer than twice the minimum leaf "
                     "size ", config.min_leaf));
  }
  CartFitter fitter;
  fitter.num_rows_ = n;
  fitter.config_ = config;
  fitter.order_.resize(features.size());
  for (size_t f = 0; f < features.size(); ++f) {
    if (kinds[f].type == ColumnType::kCategorical) continue;
    std::vector<int32_t>& order = fitter.order_[f];
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    const std::vector<double>& v = features[f];
    std::stable_sort(order.begin(), order.end(),
                     [&v](int32_t a, int32_t b) { return v[a] < v[b]; });
  }
  fitter.features_ = std::move(features);
  fitter.kinds_ = std::move(kinds);
  return fitter;
}

absl::StatusOr<CartTree> CartFitter::Fit(std::span<const uint8_t> labels,
                                         std::vector<double>* fitted) const {
  const int64_t n = num_rows_;
  if (static_cast<int64_t>(labels.size()) != n) {
    return absl::InvalidArgumentError("cart: label count mismatch");
  }
  const int num_features = static_cast<int>(features_.size());
  const int64_t min_leaf = config_.min_leaf;

  std::vector<NodeStats> stats(1);
  for (uint8_t y : labels) {
    if (y > 1) return absl::InvalidArgumentError("cart: labels must be 0/1");
    (y ? stats[0].n1 : stats[0].n0) += 1;
  }
  CartTree tree;
  tree.features = kinds_;
  tree.nodes.emplace_back();

  const double min_gain =
      config_.complexity * Impurity(stats[0].n0, stats[0].n1);
  std::vector<int32_t> node_of(n, 0);

  auto splittable = [&](int k) {
    const NodeStats& s = stats[k];
    return s.depth < config_.max_depth && s.n0 > 0 && s.n1 > 0 &&
           s.n0 + s.n1 >= 2 * min_leaf;
  };
  std::vector<int> frontier;
  if (splittable(0)) frontier.push_back(0);

  std::vector<int> slot_of;
  while (!frontier.empty()) {
    const int slots = static_cast<int>(frontier.size());
    slot_of.assign(tree.nodes.size(), -1);
    for (int s = 0; s < slots; ++s) slot_of[frontier[s]] = s;
    std::vector<Candidate> best(slots);

    auto consider = [&](int s, int feature, double threshold, uint64_t mask,
                        int64_t l0, int64_t l1) {
      const NodeStats& st = stats[frontier[s]];
      const int64_t r0 = st.n0 - l0;
      const int64_t r1 = st.n1 - l1;
      if (l0 + l1 < min_leaf || r0 + r1 < min_leaf) return;
      const double gain =
          Impurity(st.n0, st.n1) - Impurity(l0, l1) - Impurity(r0, r1);
      // Gains that differ only by rounding count as ties, which the
      // scan order resolves (lowest feature, then smallest threshold/mask).
      if (gain > best[s].gain * (1 + 1e-12) + 1e-12) {
        best[s] = {gain, feature, threshold, mask, l0, l1};
      }
    };

    for (int f = 0; f < num_features; ++f) {
      const std::vector<double>& x = features_[f];
      if (kinds_[f].type != ColumnType::kCategorical) {
        std::vector<int64_t> l0(slots, 0), l1(slots, 0);
        std::vector<double> last(slots, 0.0);
        std::vector<bool> seen(slots, false);
        for (int32_t r : order_[f]) {
          const int s = slot_of[node_of[r]];
          if (s < 0) continue;
          const double v = x[r];
          if (seen[s] && v > last[s]) {
            consider(s, f, last[s] + (v - last[s]) / 2.0, 0, l0[s], l1[s]);
          }
          (labels[r] ? l1[s] : l0[s]) += 1;
          last[s] = v;
          seen[s] = true;
        }
        continue;
      }
      const int levels = kinds_[f].level_count;
      std::vector<int64_t> counts(static_cast<size_t>(slots) * levels * 2, 0);
      for (int64_t r = 0; r < n; ++r) {
        const int s = slot_of[node_of[r]];
        if (s < 0) continue;
        const int level = static_cast<int>(x[r]);
        counts[(static_cast<size_t>(s) * levels + level) * 2 + labels[r]] += 1;
      }
      for (int s = 0; s < slots; ++s) {
        const int64_t* c = &counts[static_cast<size_t>(s) * levels * 2];
        if (levels <= kMaxEnumeratedLevels) {
          // Masks containing level 0, excluding the full set.
          const uint64_t full = (uint64_t{1} << levels) - 1;
          for (uint64_t rest = 0; rest < (uint64_t{1} << (levels - 1));
               ++rest) {
            const uint64_t mask = 1 | (rest << 1);
            if (mask == full) continue;
            int64_t m0 = 0, m1 = 0;
            for (int l = 0; l < levels; ++l) {
              if ((mask >> l) & 1u) {
                m0 += c[2 * l];
                m1 += c[2 * l + 1];
              }
            }
            consider(s, f, 0.0, mask, m0, m1);
          }
          continue;
        }
        std::vector<int> present;
        for (int l = 0; l < levels && l < 64; ++l) {
          if (c[2 * l] + c[2 * l + 1] > 0) present.push_back(l);
        }
        std::stable_sort(present.begin(), present.end(), [c](int a, int b) {
          // c1a / na < c1b / nb without division.
          return c[2 * a + 1] * (c[2 * b] + c[2 * b + 1]) <
                 c[2 * b + 1] * (c[2 * a] + c[2 * a + 1]);
        });
        uint64_t mask = 0;
        int64_t m0 = 0, m1 = 0;
        for (size_t k = 0; k + 1 < present.size(); ++k) {
          const int l = present[k];
          mask |= uint64_t{1} << l;
          m0 += c[2 * l];
          m1 += c[2 * l + 1];
          consider(s, f, 0.0, mask, m0, m1);
        }
      }
    }

    // Grow the accepted splits.
    std::vector<int> next;
    std::vector<int> split_slot(tree.nodes.size(), -1);
    for (int s = 0; s < slots; ++s) {
      const Candidate& b = best[s];
      if (b.feature < 0 || !(b.gain > 0.0) || b.gain < min_gain) continue;
      const int k = frontier[s];
      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      CartNode& node = tree.nodes[k];
      node.feature = b.feature;
      node.threshold = b.threshold;
      node.left_levels = b.left_levels;
      node.left = left;
      node.right = left + 1;
      const NodeStats parent = stats[k];
      stats.push_back({b.left0, b.left1, parent.depth + 1});
      stats.push_back(
          {parent.n0 - b.left0, parent.n1 - b.left1, parent.depth + 1});
      split_slot[k] = s;
      if (splittable(left)) next.push_back(left);
      if (splittable(left + 1)) next.push_back(left + 1);
    }
    for (int64_t r = 0; r < n; ++r) {
      const int k = node_of[r];
      if (k >= static_cast<int>(split_slot.size()) || split_slot[k] < 0) {
        continue;
      }
      const CartNode& node = tree.nodes[k];
      node_of[r] = GoesLeft(node, kinds_[node.feature], features_[node.feature][r])
                       ? node.left
                       : node.right;
    }
    frontier = std::move(next);
  }

  for (size_t k = 0; k < tree.nodes.size(); ++k) {
    const NodeStats& s = stats[k];
    tree.nodes[k].count = s.n0 + s.n1;
    tree.nodes[k].probability =
        tree.nodes[k].count == 0
            ? 0.0
            : static_cast<double>(s.n1) / static_cast<double>(tree.nodes[k].count);
  }
  if (fitted != nullptr) {
    fitted->resize(n);
    for (int64_t r = 0; r < n; ++r) {
      (*fitted)[r] = tree.nodes[node_of[r]].probability;
    }
  }
  return tree;
}

absl::StatusOr<CartTree> CartFit(std::vector<std::vector<double>> features,
                                 std::vector<ColumnKind> kinds,
                                 std::span<const uint8_t> labels,
                                 const CartConfig& config) {
  absl::StatusOr<CartFitter> fitter =
      CartFitter::Create(std::move(features), std::move(kinds), config);
  if (!fitter.ok()) return fitter.status();
  return fitter->Fit(labels);
}

}  // namespace synthbench
