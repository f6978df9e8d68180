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

#ifndef MATSPACE_SIMPLEX_H_
#define MATSPACE_SIMPLEX_H_

#include <Eigen/Core>

namespace matspace {

struct LpResult {
  enum class Status { kOptimal, kInfeasible, kUnbounded };
  Status status = Status::kInfeasible;
  double objective = 0.0;
  Eigen::VectorXd x;
  // Phase-one optimum: the smallest L1 constraint violation reachable.
  double infeasibility = 0.0;
};

// Dense two-phase simplex with Bland's rule for
//   minimise c^T x  subject to  A x = b,  x >= 0.
// The problem is declared infeasible when the phase-one optimum exceeds
// feasibility_tol.
LpResult solve_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                  const Eigen::VectorXd& c, double feasibility_tol);

// Phase one only: minimal L1 violation of A x = b over x >= 0, together
// with the minimising x.
LpResult min_violation(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

}  // namespace matspace

#endif  // MATSPACE_SIMPLEX_H_
