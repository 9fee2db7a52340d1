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

#include "mono3d/rng.h"

#include <array>
#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "mono3d/errors.h"

namespace mono3d {
namespace {

TEST(Rng, SameSeedSameSequence) {
  Rng a(17), b(17), c(18);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const uint64_t x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    differs |= x != c.next_u64();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, StreamSeedsAreDistinct) {
  std::set<uint64_t> seen;
  for (uint64_t s = 0; s < 4; ++s) {
    for (uint64_t k = 0; k < 1000; ++k) seen.insert(stream_seed(s, k));
  }
  EXPECT_EQ(seen.size(), 4000u);
  EXPECT_EQ(stream_seed(5, 6), stream_seed(5, 6));
}

TEST(Rng, UniformRanges) {
  Rng rng(1);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    const double v = rng.uniform(-2.0, 3.0);
    ASSERT_GE(v, -2.0);
    ASSERT_LE(v, 3.0);
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(Rng, UniformIntCoversInclusiveRange) {
  Rng rng(2);
  std::array<int, 5> counts{};
  for (int i = 0; i < 50000; ++i) {
    const int k = rng.uniform_int(3, 7);
    ASSERT_GE(k, 3);
    ASSERT_LE(k, 7);
    ++counts[k - 3];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);
  EXPECT_EQ(rng.uniform_int(4, 4), 4);
  EXPECT_THROW(rng.uniform_int(5, 4), DomainError);
}

TEST(Rng, NormalMoments) {
  Rng rng(3);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal(1.5, 2.0);
    s1 += x;
    s2 += x * x;
  }
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  // Five standard errors.
  EXPECT_NEAR(mean, 1.5, 5 * 2.0 / std::sqrt(n));
  EXPECT_NEAR(var, 4.0, 5 * 4.0 * std::sqrt(2.0 / n));
}

TEST(Rng, PoissonMeanAndVariance) {
  Rng rng(4);
  const int n = 100000;
  const double lambda = 3.0;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const int k = rng.poisson(lambda);
    ASSERT_GE(k, 0);
    s1 += k;
    s2 += static_cast<double>(k) * k;
  }
  const double mean = s1 / n;
  EXPECT_NEAR(mean, lambda, 5 * std::sqrt(lambda / n));
  EXPECT_NEAR(s2 / n - mean * mean, lambda, 0.1);
  EXPECT_EQ(rng.poisson(0.0), 0);
  EXPECT_THROW(rng.poisson(-1.0), DomainError);
}

TEST(Rng, CategoricalFollowsWeights) {
  Rng rng(5);
  const std::vector<double> w = {0.6, 0.0, 0.2, 0.2};
  std::array<int, 4> counts{};
  for (int i = 0; i < 50000; ++i) ++counts[rng.categorical(w)];
  EXPECT_EQ(counts[1], 0);
  EXPECT_NEAR(counts[0], 30000, 600);
  EXPECT_NEAR(counts[2], 10000, 450);
  const std::vector<double> zeros = {0.0, 0.0};
  EXPECT_THROW(rng.categorical(zeros), DomainError);
}

}  // namespace
}  // namespace mono3d
