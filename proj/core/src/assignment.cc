/* Copyright 2026 The Mono3D Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "mono3d/assignment.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mono3d/errors.h"

namespace mono3d {

std::vector<MatchPair> min_cost_matching(const CostMatrix& cost) {
  if (cost.empty()) return {};
  const int num_pred = cost.rows();
  const int num_gt = cost.cols();
  for (int r = 0; r < num_pred; ++r) {
    for (int c = 0; c < num_gt; ++c) {
      const double v = cost.at(r, c);
      if (!std::isfinite(v) || v < 0.0) {
        throw DomainError("assignment costs must be finite and non-negative");
      }
    }
  }

  // Square problem, 1-based: rows are gt columns of the input so the outer
  // loop visits ground truth in index order.
  const int n = std::max(num_pred, num_gt);
  auto entry = [&](int gt, int pred) {
    return gt < num_gt && pred < num_pred ? cost.at(pred, gt) : kPaddingCost;
  };
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> owner(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    owner[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = owner[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = entry(i0 - 1, j - 1) - u[i0] - v[j];
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
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const int j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<MatchPair> pairs;
  for (int j = 1; j <= n; ++j) {
    const int gt = owner[j] - 1;
    const int pred = j - 1;
    if (gt < num_gt && pred < num_pred) {
      pairs.push_back({pred, gt, cost.at(pred, gt)});
    }
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const MatchPair& a, const MatchPair& b) { return a.gt < b.gt; });
  return pairs;
}

double total_cost(std::span<const MatchPair> pairs) {
  double sum = 0.0;
  for (const auto& p : pairs) sum += p.cost;
  return sum;
}

}  // namespace mono3d
