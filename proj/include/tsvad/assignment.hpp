// include/tsvad/assignment.hpp

// Copyright 2026 The tsvad-kit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <type_traits>
#include <vector>

namespace tsvad {

template <typename T>
using CostMatrix = std::vector<std::vector<T>>;

template <typename T>
struct Assignment {
  T cost{};
  // Column assigned to each row, or -1 when the row is left unassigned
  // (only possible when there are more rows than columns).
  std::vector<std::ptrdiff_t> row_to_col;
};

/// Minimum-cost assignment (Hungarian method with potentials, O(n^3)).
/// Rectangular inputs are padded with zero-cost dummy rows/columns. The
/// result depends only on the matrix, so equal inputs give equal outputs.
template <typename T>
Assignment<T> solve_assignment(const CostMatrix<T> &cost) {
  static_assert(std::is_arithmetic_v<T>);
  const std::size_t rows = cost.size();
  const std::size_t cols = rows ? cost.front().size() : 0;
  Assignment<T> result;
  result.row_to_col.assign(rows, -1);
  if (rows == 0 || cols == 0) return result;

  const std::size_t n = std::max(rows, cols);
  auto at = [&](std::size_t i, std::size_t j) -> T {
    return (i < rows && j < cols) ? cost[i][j] : T{};
  };
  const T inf = std::numeric_limits<T>::has_infinity
                    ? std::numeric_limits<T>::infinity()
                    : std::numeric_limits<T>::max() / 4;

  // 1-based arrays; p[j] is the row matched to column j.
  std::vector<T> u(n + 1, T{}), v(n + 1, T{});
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<T> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      std::size_t i0 = p[j0], j1 = 0;
      T delta = inf;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        T cur = at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  for (std::size_t j = 1; j <= n; ++j) {
    std::size_t i = p[j];
    if (i == 0 || i > rows || j > cols) continue;
    result.row_to_col[i - 1] = static_cast<std::ptrdiff_t>(j - 1);
    result.cost += cost[i - 1][j - 1];
  }
  return result;
}

/// Maximum-weight assignment, via negated costs.
template <typename T>
Assignment<T> solve_max_assignment(const CostMatrix<T> &weight) {
  CostMatrix<T> neg = weight;
  for (auto &row : neg)
    for (auto &x : row) x = -x;
  Assignment<T> a = solve_assignment(neg);
  a.cost = -a.cost;
  return a;
}

}  // namespace tsvad
