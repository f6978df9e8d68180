// Copyright 2026 The matspace Authors. All Rights Reserved.
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

#include "matspace/simplex.h"

#include <cmath>
#include <functional>
#include <optional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

namespace matspace {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Status = LpResult::Status;

// Brute force over every basis: the optimum of a bounded feasible LP in
// standard form is attained at a basic feasible solution.
std::optional<double> vertex_oracle(const MatrixXd& a, const VectorXd& b,
                                    const VectorXd& c) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  std::optional<double> best;
  std::vector<int> pick(m);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == m) {
      MatrixXd basis(m, m);
      for (int i = 0; i < m; ++i) basis.col(i) = a.col(pick[i]);
      Eigen::FullPivLU<MatrixXd> lu(basis);
      if (lu.rank() < m) return;
      const VectorXd xb = lu.solve(b);
      if ((basis * xb - b).norm() > 1e-9 || xb.minCoeff() < -1e-12) return;
      double obj = 0.0;
      for (int i = 0; i < m; ++i) obj += c(pick[i]) * xb(i);
      if (!best || obj < *best) best = obj;
      return;
    }
    for (int j = start; j < n; ++j) {
      pick[depth] = j;
      rec(j + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

TEST(Simplex, SmallKnownProblem) {
  // min -x1 - 2 x2  s.t. x1 + x2 + s1 = 4, x1 + 3 x2 + s2 = 6.
  MatrixXd a(2, 4);
  a << 1, 1, 1, 0, 1, 3, 0, 1;
  VectorXd b(2);
  b << 4, 6;
  VectorXd c(4);
  c << -1, -2, 0, 0;
  const LpResult r = solve_lp(a, b, c, 1e-9);
  ASSERT_EQ(r.status, Status::kOptimal);
  EXPECT_NEAR(r.objective, -5.0, 1e-12);
  EXPECT_NEAR(r.x(0), 3.0, 1e-12);
  EXPECT_NEAR(r.x(1), 1.0, 1e-12);
}

TEST(Simplex, Infeasible) {
  MatrixXd a(2, 2);
  a << 1, 1, 1, 1;
  VectorXd b(2);
  b << 1, 2;
  const LpResult r = solve_lp(a, b, VectorXd::Zero(2), 1e-9);
  EXPECT_EQ(r.status, Status::kInfeasible);
  EXPECT_NEAR(min_violation(a, b).infeasibility, 1.0, 1e-12);
}

TEST(Simplex, Unbounded) {
  MatrixXd a(1, 2);
  a << 1, -1;
  VectorXd b(1);
  b << 1;
  VectorXd c(2);
  c << 0, -1;
  EXPECT_EQ(solve_lp(a, b, c, 1e-9).status, Status::kUnbounded);
}

TEST(Simplex, NegativeRightHandSide) {
  MatrixXd a(1, 2);
  a << -1, -1;
  VectorXd b(1);
  b << -2;
  VectorXd c(2);
  c << 1, 3;
  const LpResult r = solve_lp(a, b, c, 1e-9);
  ASSERT_EQ(r.status, Status::kOptimal);
  EXPECT_NEAR(r.objective, 2.0, 1e-12);
}

TEST(Simplex, RedundantRows) {
  MatrixXd a(3, 3);
  a << 1, 1, 1, 2, 2, 2, 1, 0, 0;
  VectorXd b(3);
  b << 1, 2, 0.25;
  VectorXd c(3);
  c << 0, 1, -1;
  const LpResult r = solve_lp(a, b, c, 1e-9);
  ASSERT_EQ(r.status, Status::kOptimal);
  EXPECT_NEAR(r.objective, -0.75, 1e-12);
}

TEST(Simplex, MatchesVertexEnumeration) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 3, n = 7;
    MatrixXd a(m, n);
    for (auto& v : a.reshaped()) v = u(rng);
    // Feasible by construction; a positive row keeps it bounded.
    a.row(0) = a.row(0).cwiseAbs().array() + 0.1;
    VectorXd x0(n);
    for (auto& v : x0) v = std::abs(u(rng));
    const VectorXd b = a * x0;
    VectorXd c(n);
    for (auto& v : c) v = u(rng);
    const LpResult r = solve_lp(a, b, c, 1e-9);
    const auto oracle = vertex_oracle(a, b, c);
    ASSERT_TRUE(oracle.has_value());
    ASSERT_EQ(r.status, Status::kOptimal);
    EXPECT_NEAR(r.objective, *oracle, 1e-9 * std::max(1.0, std::abs(*oracle)));
    EXPECT_LE((a * r.x - b).norm(), 1e-9);
    EXPECT_GE(r.x.minCoeff(), -1e-12);
    ++compared;
  }
  EXPECT_EQ(compared, 200);
}

}  // namespace
}  // namespace matspace
