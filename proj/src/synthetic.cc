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

#include "matspace/synthetic.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "matspace/ratings.h"

namespace matspace {
namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double gaussian(std::mt19937_64& rng) {
  // Box-Muller on the portable uniform.
  const double u1 = uniform(rng, 0x1.0p-53, 1.0);
  const double u2 = uniform(rng, 0.0, 1.0);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

Brdf synthetic_brdf(const TableShape& shape, const SyntheticMaterial& m) {
  Brdf b(shape, 3);
  const double lobe_norm = 1.0 / (std::numbers::pi * m.roughness * m.roughness);
  for (int th = 0; th < shape.theta_h; ++th) {
    for (int td = 0; td < shape.theta_d; ++td) {
      for (int pd = 0; pd < shape.phi_d; ++pd) {
        const HalfDiffCoords c = bin_center(shape, {th, td, pd});
        const std::size_t bin = b.bin(th, td, pd);
        if (c.theta_d > m.invalid_above_theta_d) {
          for (int ch = 0; ch < 3; ++ch) b.set_invalid(ch, bin);
          continue;
        }
        const double fresnel = m.f0 + (1.0 - m.f0) * std::pow(1.0 - std::cos(c.theta_d), 5);
        const double x = c.theta_h / m.roughness;
        const double lobe = fresnel * std::exp(-x * x) * lobe_norm;
        for (int ch = 0; ch < 3; ++ch) {
          b.set_reflectance(ch, bin,
                            m.diffuse(ch) / std::numbers::pi + m.specular(ch) * lobe);
        }
      }
    }
  }
  return b;
}

SyntheticMaterial random_material(std::mt19937_64& rng, bool gray) {
  SyntheticMaterial m;
  const double kd = uniform(rng, 0.02, 0.8);
  const double ks = uniform(rng, 0.0, 1.0) < 0.2 ? 0.0 : uniform(rng, 0.01, 1.0);
  for (int c = 0; c < 3; ++c) {
    const double tint_d = gray ? 1.0 : uniform(rng, 0.4, 1.0);
    const double tint_s = gray ? 1.0 : uniform(rng, 0.7, 1.0);
    m.diffuse(c) = kd * tint_d;
    m.specular(c) = ks * tint_s;
  }
  m.roughness = uniform(rng, 0.05, 0.6);
  m.f0 = uniform(rng, 0.02, 0.9);
  return m;
}

std::vector<Brdf> synthetic_seeds(const TableShape& shape, std::size_t n,
                                  std::uint64_t seed, bool gray) {
  std::mt19937_64 rng(seed);
  std::vector<Brdf> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(synthetic_brdf(shape, random_material(rng, gray)));
  }
  return out;
}

Eigen::MatrixXd synthetic_attribute_scores(std::span<const CoeffVector> alphas,
                                           std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(alphas.size());
  if (n == 0) return Eigen::MatrixXd(0, kAttributeCount);
  const Eigen::Index d = alphas.front().size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const auto& a : alphas) mean += a;
  mean /= static_cast<double>(n);
  Eigen::VectorXd sd = Eigen::VectorXd::Zero(d);
  for (const auto& a : alphas) sd += (a - mean).cwiseAbs2();
  sd = (sd / static_cast<double>(n)).cwiseSqrt();
  for (Eigen::Index k = 0; k < d; ++k) {
    if (!(sd(k) > 0.0)) sd(k) = 1.0;
  }

  std::mt19937_64 rng(seed);
  Eigen::MatrixXd out(n, kAttributeCount);
  for (int a = 0; a < kAttributeCount; ++a) {
    Eigen::VectorXd w(d);
    for (Eigen::Index k = 0; k < d; ++k) w(k) = gaussian(rng);
    w *= uniform(rng, 0.8, 1.6) / w.norm();
    const double bias = uniform(rng, -0.5, 0.5);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::VectorXd z =
          (alphas[static_cast<std::size_t>(i)] - mean).cwiseQuotient(sd);
      out(i, a) = 1.0 / (1.0 + std::exp(-(w.dot(z) + bias)));
    }
  }
  return out;
}

}  // namespace matspace
