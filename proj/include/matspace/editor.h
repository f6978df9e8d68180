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

#ifndef MATSPACE_EDITOR_H_
#define MATSPACE_EDITOR_H_

#include <string_view>
#include <vector>

#include "matspace/functionals.h"
#include "matspace/merl_io.h"
#include "matspace/pca_basis.h"
#include "matspace/synthesis.h"

namespace matspace {

struct EditOptions {
  double armijo = 1e-4;
  double shrink = 0.5;
  double initial_step = 1.0;
  // Longest trial step as a fraction of the widest hull extent, so the
  // descent follows the gradient path instead of jumping across the hull.
  double max_step_fraction = 0.005;
  int max_iterations = 1000;
  double target_tolerance = 1e-3;  // |phi - y_obj|
  double min_step = 1e-8;          // step norm
  int boundary_bisections = 8;
  int max_backtracks = 60;
};

enum class EditStatus { kConverged, kHullBoundary, kMaxIters };
std::string_view status_name(EditStatus s);

struct EditResult {
  CoeffVector alpha_final;
  std::vector<CoeffVector> path;  // starts at alpha_ini
  double achieved_y = 0.0;        // raw prediction at alpha_final
  EditStatus status = EditStatus::kConverged;
};

// Minimises (phi(alpha) - y_obj)^2 by gradient descent with Armijo
// backtracking from alpha_ini. A step that leaves the hull is cut back by
// bisection to the last inside point and the run stops. Throws
// ArgumentError when alpha_ini is outside the hull.
EditResult edit(const RbfModel& model, const HullModel& hull,
                const CoeffVector& alpha_ini, double y_obj,
                const EditOptions& options = {});

// Applies the coefficient change of `result` to the original's luminance
// in the mapped domain (keeping the part of the BRDF outside the basis
// span), unmaps, and merges the original chroma (optionally edited).
// Invalid bins of the original stay invalid.
Brdf apply_edit(const PcaBasis& basis, const Brdf& original,
                const EditResult& result, const ChromaEdit& chroma = {});

// Achromatic coefficients of an RGB BRDF.
CoeffVector achromatic_alpha(const PcaBasis& basis, const Brdf& rgb);

// |phi(a) - phi(b)| on raw predictions rounded to 2^-40, which keeps the
// triangle inequality exact in floating point.
double attr_distance(const RbfModel& model, const CoeffVector& alpha_a,
                     const CoeffVector& alpha_b);
double attr_distance(const RbfModel& model, const CoeffVector& alpha_a,
                     const CoeffVector& alpha_b, std::string_view basis_hash);

enum class RmseVariant { kPlain, kCosineWeighted, kCosineWeightedCubeRoot };
RmseVariant parse_rmse_variant(std::string_view name);
std::string_view rmse_variant_name(RmseVariant v);

// RMSE over bins and channels valid in both. The cosine variants compare
// w * rho (or w * cbrt(rho)) with the log-map cosine weight w. Throws
// MissingDataError when no bin is valid in both.
double rmse_distance(const Brdf& a, const Brdf& b, RmseVariant variant,
                     double cosine_floor = kDefaultCosineFloor);

}  // namespace matspace

#endif  // MATSPACE_EDITOR_H_
