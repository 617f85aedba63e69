// tests/assignment_test.cpp

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

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "tsvad/assignment.hpp"

using namespace tsvad;

TEST(Assignment, Empty) {
  EXPECT_TRUE(solve_assignment(CostMatrix<double>{}).row_to_col.empty());
}

TEST(Assignment, Small) {
  CostMatrix<int> c = {{4, 1, 3}, {2, 0, 5}, {3, 2, 2}};
  auto a = solve_assignment(c);
  EXPECT_EQ(a.cost, 5);
  EXPECT_EQ(a.row_to_col, (std::vector<std::ptrdiff_t>{1, 0, 2}));
}

TEST(Assignment, RectangularMoreRows) {
  CostMatrix<int> c = {{5}, {1}, {3}};
  auto a = solve_assignment(c);
  EXPECT_EQ(a.cost, 1);
  EXPECT_EQ(a.row_to_col, (std::vector<std::ptrdiff_t>{-1, 0, -1}));
}

TEST(Assignment, MaxWeightMatchesExhaustive) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t R = 1 + rng() % 6, C = 1 + rng() % 6;
    CostMatrix<double> w(R, std::vector<double>(C));
    for (auto &row : w)
      for (auto &x : row) x = u(rng);
    auto a = solve_max_assignment(w);
    EXPECT_NEAR(a.cost, oracle::best_partial_matching(w), 1e-9);
    std::set<std::ptrdiff_t> used;
    for (auto c : a.row_to_col)
      if (c >= 0) EXPECT_TRUE(used.insert(c).second);
  }
}

TEST(Assignment, IntegerMinCostMatchesExhaustive) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = 1 + rng() % 6;
    CostMatrix<std::int64_t> c(n, std::vector<std::int64_t>(n));
    for (auto &row : c)
      for (auto &x : row) x = static_cast<std::int64_t>(rng() % 20);
    // Square, all rows matched: negate into a max problem for the oracle.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::int64_t best = INT64_MAX;
    do {
      std::int64_t s = 0;
      for (std::size_t i = 0; i < n; ++i) s += c[i][perm[i]];
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_EQ(solve_assignment(c).cost, best);
  }
}
