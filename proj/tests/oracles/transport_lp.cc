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

// Each point of `a` carries nb unit atoms and each point of `b` carries na,
// so both sides hold na * nb atoms. The transport polytope has integral
// vertices, hence the optimal assignment of atoms is an optimal plan.

#include <cmath>
#include <limits>

#include "oracles/oracles.h"

namespace synthbench::oracle {
namespace {

// Minimum-cost perfect matching, O(n^3) shortest augmenting paths with
// potentials. cost is n x n.
double Hungarian(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) total += cost[match[j] - 1][j - 1];
  return total;
}

}  // namespace

double TransportCost(const std::vector<double>& a,
                     const std::vector<double>& b) {
  const size_t na = a.size();
  const size_t nb = b.size();
  std::vector<double> left, right;
  for (double x : a) left.insert(left.end(), nb, x);
  for (double y : b) right.insert(right.end(), na, y);
  std::vector<std::vector<double>> cost(left.size(),
                                        std::vector<double>(right.size()));
  for (size_t i = 0; i < left.size(); ++i) {
    for (size_t j = 0; j < right.size(); ++j) {
      cost[i][j] = std::abs(left[i] - right[j]);
    }
  }
  return Hungarian(cost) / static_cast<double>(na * nb);
}

}  // namespace synthbench::oracle
