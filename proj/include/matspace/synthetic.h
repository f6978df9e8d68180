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

#ifndef MATSPACE_SYNTHETIC_H_
#define MATSPACE_SYNTHETIC_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "matspace/merl_io.h"
#include "matspace/pca_basis.h"

namespace matspace {

// Analytic isotropic material used to generate test tables: Lambertian
// diffuse plus a Gaussian half-angle lobe with Schlick Fresnel.
struct SyntheticMaterial {
  Eigen::Vector3d diffuse{0.5, 0.5, 0.5};   // albedo
  Eigen::Vector3d specular{0.0, 0.0, 0.0};  // lobe amplitude
  double roughness = 0.2;                   // lobe width in radians
  double f0 = 0.04;
  // Marks bins with theta_d above this angle as unmeasured (disabled at
  // the default).
  double invalid_above_theta_d = 10.0;
};

// rho = diffuse/pi + specular * F(theta_d) * exp(-(theta_h/m)^2) / (pi m^2)
// evaluated at bin centres.
Brdf synthetic_brdf(const TableShape& shape, const SyntheticMaterial& m);

// Random plausible material; `gray` forces equal channels.
SyntheticMaterial random_material(std::mt19937_64& rng, bool gray = false);

std::vector<Brdf> synthetic_seeds(const TableShape& shape, std::size_t n,
                                  std::uint64_t seed, bool gray = false);

// Fourteen smooth ground-truth attribute scores in (0, 1) per coefficient
// vector: logistic functions of random directions in the standardised
// coefficient space. Returns (points x 14).
Eigen::MatrixXd synthetic_attribute_scores(std::span<const CoeffVector> alphas,
                                           std::uint64_t seed);

}  // namespace matspace

#endif  // MATSPACE_SYNTHETIC_H_
