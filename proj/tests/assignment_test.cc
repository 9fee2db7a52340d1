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
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "mono3d/errors.h"

namespace mono3d {
namespace {

// Minimum over all injections of the smaller side into the larger one,
// summing the chosen entries in ground-truth order.
double BruteForceMinimum(const CostMatrix& cost) {
  const int rows = cost.rows(), cols = cost.cols();
  const int n = std::max(rows, cols);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    // perm[gt] = pred; entries outside the matrix are padding.
    double sum = 0;
    for (int gt = 0; gt < cols; ++gt) {
      if (perm[gt] < rows) sum += cost.at(perm[gt], gt);
    }
    best = std::min(best, sum);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

TEST(MatchingTest, Examples) {
  CostMatrix diag(2, 2);
  diag.at(0, 1) = 1;
  diag.at(1, 0) = 1;
  const auto pairs = min_cost_matching(diag);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0], (MatchPair{0, 0, 0.0}));
  EXPECT_EQ(pairs[1], (MatchPair{1, 1, 0.0}));
  EXPECT_EQ(total_cost(pairs), 0.0);

  CostMatrix one(1, 1, 0.3);
  EXPECT_EQ(min_cost_matching(one), (std::vector<MatchPair>{{0, 0, 0.3}}));
  EXPECT_TRUE(min_cost_matching(CostMatrix()).empty());
  EXPECT_TRUE(min_cost_matching(CostMatrix(0, 3)).empty());
  EXPECT_TRUE(min_cost_matching(CostMatrix(2, 0)).empty());
}

TEST(MatchingTest, RejectsBadEntries) {
  CostMatrix m(2, 2, 0.5);
  m.at(1, 1) = -0.1;
  EXPECT_THROW(min_cost_matching(m), DomainError);
  m.at(1, 1) = std::nan("");
  EXPECT_THROW(min_cost_matching(m), DomainError);
  m.at(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(min_cost_matching(m), DomainError);
}

TEST(MatchingTest, RectangularUsesSmallerSide) {
  CostMatrix wide(2, 4);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 4; ++c) wide.at(r, c) = 0.9;
  }
  wide.at(0, 3) = 0.1;
  wide.at(1, 2) = 0.2;
  const auto pairs = min_cost_matching(wide);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0], (MatchPair{1, 2, 0.2}));
  EXPECT_EQ(pairs[1], (MatchPair{0, 3, 0.1}));
}

TEST(MatchingTest, EqualsBruteForceOnDyadicMatrices) {
  // Entries k/16 make sums exact and ties common.
  std::mt19937_64 gen(13);
  std::uniform_int_distribution<int> size(1, 6), entry(0, 16);
  for (int trial = 0; trial < 1000; ++trial) {
    CostMatrix m(size(gen), size(gen));
    for (int r = 0; r < m.rows(); ++r) {
      for (int c = 0; c < m.cols(); ++c) m.at(r, c) = entry(gen) / 16.0;
    }
    const auto pairs = min_cost_matching(m);
    ASSERT_EQ(pairs.size(),
              static_cast<size_t>(std::min(m.rows(), m.cols())));
    std::vector<char> pred_seen(m.rows(), 0), gt_seen(m.cols(), 0);
    for (const MatchPair& p : pairs) {
      EXPECT_FALSE(pred_seen[p.pred]++);
      EXPECT_FALSE(gt_seen[p.gt]++);
      EXPECT_EQ(p.cost, m.at(p.pred, p.gt));
    }
    EXPECT_EQ(total_cost(pairs), BruteForceMinimum(m));
  }
}

TEST(MatchingTest, DeterministicUnderTies) {
  CostMatrix flat(3, 3, 0.5);
  const auto a = min_cost_matching(flat);
  const auto b = min_cost_matching(flat);
  EXPECT_EQ(a, b);
  EXPECT_EQ(total_cost(a), 1.5);
}

}  // namespace
}  // namespace mono3d
