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

// Minimum-cost bipartite assignment (Kuhn-Munkres with potentials).

#ifndef MONO3D_ASSIGNMENT_H_
#define MONO3D_ASSIGNMENT_H_

#include <span>
#include <vector>

namespace mono3d {

// Dense row-major matrix; rows are predictions, columns ground-truth boxes.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }
  double& at(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double at(int r, int c) const {
    return data_[static_cast<size_t>(r) * cols_ + c];
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

struct MatchPair {
  int pred = 0;
  int gt = 0;
  double cost = 0.0;

  bool operator==(const MatchPair&) const = default;
};

// Cost charged for leaving a row or column unassigned when the matrix is
// padded to square.
inline constexpr double kPaddingCost = 1.0;

// Minimum total cost one-to-one assignment of min(rows, cols) pairs. The
// matrix is padded to square with kPaddingCost. Ground-truth columns are
// processed in index order and ties go to the lowest index, so equal-cost
// optima resolve deterministically. Result is sorted by gt index.
// Throws DomainError on non-finite or negative entries.
std::vector<MatchPair> min_cost_matching(const CostMatrix& cost);

double total_cost(std::span<const MatchPair> pairs);

}  // namespace mono3d

#endif  // MONO3D_ASSIGNMENT_H_
