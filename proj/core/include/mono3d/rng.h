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

// Seeded random streams with distributions implemented here rather than by
// <random>, whose distribution algorithms differ between standard libraries.
// The engine is std::mt19937_64, whose raw output the standard fixes.

#ifndef MONO3D_RNG_H_
#define MONO3D_RNG_H_

#include <cstdint>
#include <random>
#include <span>

namespace mono3d {

uint64_t splitmix64(uint64_t x);

// Seed of independent stream `stream` under master seed `seed`.
uint64_t stream_seed(uint64_t seed, uint64_t stream);

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  // Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);
  // Standard normal by the Box-Muller transform; consumes two draws.
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  bool bernoulli(double p) { return uniform() < p; }
  // Knuth's multiplication method; intended for small means.
  int poisson(double mean);
  // Index drawn proportionally to non-negative weights.
  int categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

}  // namespace mono3d

#endif  // MONO3D_RNG_H_
