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

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "matspace/error.h"

namespace matspace {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr int kMaxPivots = 50000;

// Tableau rows 0..m-1 hold [A | I | b]; basis_[i] is the basic column of
// row i. Columns n..n+m-1 are artificials.
class Tableau {
 public:
  Tableau(const MatrixXd& a, const VectorXd& b)
      : m_(a.rows()), n_(a.cols()), t_(a.rows(), a.cols() + a.rows() + 1) {
    t_.setZero();
    t_.leftCols(n_) = a;
    t_.block(0, n_, m_, m_).setIdentity();
    t_.col(rhs()) = b;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (t_(i, rhs()) < 0.0) {
        t_.row(i).head(n_) *= -1.0;
        t_(i, rhs()) *= -1.0;
      }
    }
    basis_.resize(static_cast<std::size_t>(m_));
    for (Eigen::Index i = 0; i < m_; ++i) basis_[i] = n_ + i;
    scale_ = std::max(1.0, a.cwiseAbs().maxCoeff());
  }

  Eigen::Index rhs() const { return n_ + m_; }

  // Runs the simplex on cost vector `cost` (length n + m) over columns
  // [0, allowed). Returns false if unbounded.
  bool optimise(const VectorXd& cost, Eigen::Index allowed) {
    const double piv_tol = 1e-11 * scale_;
    const double cost_tol = 1e-12 * std::max(1.0, cost.cwiseAbs().maxCoeff()) * scale_;
    for (int iter = 0; iter < kMaxPivots; ++iter) {
      // Reduced costs d_j = c_j - c_B^T T_j; Bland: first negative.
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        if (is_basic(j)) continue;
        double d = cost(j);
        for (Eigen::Index i = 0; i < m_; ++i) d -= cost(basis_[i]) * t_(i, j);
        if (d < -cost_tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double p = t_(i, enter);
        if (p <= piv_tol) continue;
        const double ratio = t_(i, rhs()) / p;
        if (ratio < best - 1e-15 ||
            (ratio <= best + 1e-15 && leave >= 0 && basis_[i] < basis_[leave])) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw NumericError("simplex iteration limit reached");
  }

  // Pivots remaining zero-level artificials out of the basis where a
  // structural column is available.
  void drive_out_artificials() {
    const double piv_tol = 1e-9 * scale_;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (!is_basic(j) && std::abs(t_(i, j)) > piv_tol) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  double objective(const VectorXd& cost) const {
    double v = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) v += cost(basis_[i]) * t_(i, rhs());
    return v;
  }

  VectorXd solution() const {
    VectorXd x = VectorXd::Zero(n_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[i] < n_) x(basis_[i]) = std::max(0.0, t_(i, rhs()));
    }
    return x;
  }

  Eigen::Index n() const { return n_; }
  Eigen::Index m() const { return m_; }

 private:
  bool is_basic(Eigen::Index j) const {
    return std::find(basis_.begin(), basis_.end(), j) != basis_.end();
  }

  void pivot(Eigen::Index row, Eigen::Index col) {
    t_.row(row) /= t_(row, col);
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * t_.row(row);
    }
    basis_[static_cast<std::size_t>(row)] = col;
  }

  Eigen::Index m_;
  Eigen::Index n_;
  MatrixXd t_;
  std::vector<Eigen::Index> basis_;
  double scale_ = 1.0;
};

VectorXd phase_one_cost(Eigen::Index n, Eigen::Index m) {
  VectorXd c = VectorXd::Zero(n + m);
  c.tail(m).setOnes();
  return c;
}

}  // namespace

LpResult min_violation(const MatrixXd& a, const VectorXd& b) {
  if (a.rows() != b.size()) throw ArgumentError("LP dimension mismatch");
  Tableau t(a, b);
  const VectorXd c1 = phase_one_cost(t.n(), t.m());
  t.optimise(c1, t.n() + t.m());
  LpResult r;
  r.infeasibility = std::max(0.0, t.objective(c1));
  r.x = t.solution();
  r.objective = r.infeasibility;
  r.status = LpResult::Status::kOptimal;
  return r;
}

LpResult solve_lp(const MatrixXd& a, const VectorXd& b, const VectorXd& c,
                  double feasibility_tol) {
  if (a.rows() != b.size() || a.cols() != c.size()) {
    throw ArgumentError("LP dimension mismatch");
  }
  Tableau t(a, b);
  const VectorXd c1 = phase_one_cost(t.n(), t.m());
  t.optimise(c1, t.n() + t.m());
  LpResult r;
  r.infeasibility = std::max(0.0, t.objective(c1));
  if (r.infeasibility > feasibility_tol) {
    r.status = LpResult::Status::kInfeasible;
    r.x = t.solution();
    return r;
  }
  t.drive_out_artificials();
  VectorXd c2 = VectorXd::Zero(t.n() + t.m());
  c2.head(t.n()) = c;
  if (!t.optimise(c2, t.n())) {
    r.status = LpResult::Status::kUnbounded;
    return r;
  }
  r.status = LpResult::Status::kOptimal;
  r.x = t.solution();
  r.objective = c.dot(r.x);
  return r;
}

}  // namespace matspace
