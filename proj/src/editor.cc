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

#include "matspace/editor.h"

#include <cmath>

#include "matspace/error.h"
#include "matspace/logmap.h"

namespace matspace {
namespace {

// Predictions snapped to multiples of 2^-40. Differences and sums of such
// values below 2^12 are exact, so the triangle inequality survives rounding.
double snap(double v) { return std::ldexp(std::nearbyint(std::ldexp(v, 40)), -40); }

double objective(const RbfModel& model, const CoeffVector& alpha, double y) {
  const double r = eval_raw(model, alpha) - y;
  return r * r;
}

}  // namespace

std::string_view status_name(EditStatus s) {
  switch (s) {
    case EditStatus::kConverged: return "converged";
    case EditStatus::kHullBoundary: return "hull_boundary";
    case EditStatus::kMaxIters: return "max_iters";
  }
  return "";
}

EditResult edit(const RbfModel& model, const HullModel& hull,
                const CoeffVector& alpha_ini, double y_obj,
                const EditOptions& options) {
  if (!std::isfinite(y_obj)) throw ArgumentError("target is not finite");
  if (alpha_ini.size() != model.dimension() ||
      alpha_ini.size() != hull.dimension()) {
    throw ArgumentError("coefficient dimension does not match model/hull");
  }
  if (!hull.contains(alpha_ini)) {
    throw ArgumentError("starting coefficients are outside the hull");
  }
  EditResult res;
  res.path.push_back(alpha_ini);
  CoeffVector x = alpha_ini;
  double f = objective(model, x, y_obj);
  res.status = EditStatus::kMaxIters;
  const auto [lo, hi] = hull.bounds();
  const double max_step = options.max_step_fraction * (hi - lo).maxCoeff();

  for (int it = 0; it < options.max_iterations; ++it) {
    if (std::sqrt(f) <= options.target_tolerance) {
      res.status = EditStatus::kConverged;
      break;
    }
    const CoeffVector g = 2.0 * (eval_raw(model, x) - y_obj) * grad(model, x);
    const double g2 = g.squaredNorm();
    double t = options.initial_step;
    if (max_step > 0.0 && t * std::sqrt(g2) > max_step) t = max_step / std::sqrt(g2);
    CoeffVector trial = x - t * g;
    double f_trial = objective(model, trial, y_obj);
    int backtracks = 0;
    while (!(f_trial <= f - options.armijo * t * g2) &&
           backtracks < options.max_backtracks) {
      t *= options.shrink;
      trial = x - t * g;
      f_trial = objective(model, trial, y_obj);
      ++backtracks;
    }
    if (t * std::sqrt(g2) <= options.min_step || !(f_trial <= f)) {
      res.status = EditStatus::kConverged;
      break;
    }
    if (!hull.contains(trial)) {
      CoeffVector in = x, out = trial;
      for (int b = 0; b < options.boundary_bisections; ++b) {
        const CoeffVector mid = 0.5 * (in + out);
        (hull.contains(mid) ? in : out) = mid;
      }
      const double f_in = objective(model, in, y_obj);
      if (f_in <= f && in != x) {
        x = in;
        f = f_in;
        res.path.push_back(x);
      }
      res.status = EditStatus::kHullBoundary;
      break;
    }
    x = trial;
    f = f_trial;
    res.path.push_back(x);
  }
  if (res.status == EditStatus::kMaxIters && std::sqrt(f) <= options.target_tolerance) {
    res.status = EditStatus::kConverged;
  }
  res.alpha_final = x;
  res.achieved_y = eval_raw(model, x);
  return res;
}

CoeffVector achromatic_alpha(const PcaBasis& basis, const Brdf& rgb) {
  if (!basis.reference()) throw ArgumentError("basis has no reference table");
  return project(basis, map_brdf(achromatic_of(rgb), *basis.reference()));
}

Brdf apply_edit(const PcaBasis& basis, const Brdf& original,
                const EditResult& result, const ChromaEdit& chroma) {
  if (!basis.reference()) throw ArgumentError("basis has no reference table");
  const ReferenceBrdf& ref = *basis.reference();
  if (original.channels() != 3) throw ArgumentError("apply_edit needs an RGB BRDF");
  if (result.alpha_final.size() != basis.components()) {
    throw ArgumentError("edit coefficients do not match the basis");
  }
  AchromaticSplit split = split_achromatic(original);
  MappedBrdf mapped = map_brdf(split.achromatic, ref);
  const CoeffVector alpha_orig = project(basis, mapped);
  const Eigen::VectorXd delta = basis.q() * (result.alpha_final - alpha_orig);
  auto values = mapped.channel(0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] += delta(static_cast<Eigen::Index>(i));
  }
  Brdf y = unmap_brdf(mapped, ref);
  for (std::size_t i = 0; i < y.bins(); ++i) {
    if (!split.achromatic.valid(0, i)) y.set_invalid(0, i);
  }
  return merge_achromatic(y, split.chroma, chroma);
}

double attr_distance(const RbfModel& model, const CoeffVector& alpha_a,
                     const CoeffVector& alpha_b) {
  return std::abs(snap(eval_raw(model, alpha_a)) - snap(eval_raw(model, alpha_b)));
}

double attr_distance(const RbfModel& model, const CoeffVector& alpha_a,
                     const CoeffVector& alpha_b, std::string_view basis_hash) {
  check_compatible(model, basis_hash);
  return attr_distance(model, alpha_a, alpha_b);
}

RmseVariant parse_rmse_variant(std::string_view name) {
  if (name == "plain") return RmseVariant::kPlain;
  if (name == "cosine-weighted") return RmseVariant::kCosineWeighted;
  if (name == "cosine-weighted-cuberoot") return RmseVariant::kCosineWeightedCubeRoot;
  throw ArgumentError("unknown RMSE variant '" + std::string(name) + "'");
}

std::string_view rmse_variant_name(RmseVariant v) {
  switch (v) {
    case RmseVariant::kPlain: return "plain";
    case RmseVariant::kCosineWeighted: return "cosine-weighted";
    case RmseVariant::kCosineWeightedCubeRoot: return "cosine-weighted-cuberoot";
  }
  return "";
}

double rmse_distance(const Brdf& a, const Brdf& b, RmseVariant variant,
                     double cosine_floor) {
  if (a.shape() != b.shape() || a.channels() != b.channels()) {
    throw ArgumentError("BRDFs differ in shape or channel count");
  }
  std::vector<double> w;
  if (variant != RmseVariant::kPlain) w = cosine_weights(a.shape(), cosine_floor);
  double sum = 0.0;
  std::size_t n = 0;
  for (int c = 0; c < a.channels(); ++c) {
    for (std::size_t i = 0; i < a.bins(); ++i) {
      if (!a.valid(c, i) || !b.valid(c, i)) continue;
      double x = a.reflectance(c, i);
      double y = b.reflectance(c, i);
      if (variant == RmseVariant::kCosineWeightedCubeRoot) {
        x = std::cbrt(x);
        y = std::cbrt(y);
      }
      if (variant != RmseVariant::kPlain) {
        x *= w[i];
        y *= w[i];
      }
      sum += (x - y) * (x - y);
      ++n;
    }
  }
  if (n == 0) throw MissingDataError("no bin is valid in both BRDFs");
  return std::sqrt(sum / static_cast<double>(n));
}

}  // namespace matspace
