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

#ifndef MATSPACE_SYNTHESIS_H_
#define MATSPACE_SYNTHESIS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "matspace/merl_io.h"
#include "matspace/pca_basis.h"

namespace matspace {

inline constexpr double kHullTolerance = 1e-7;

// Convex hull of seed coefficient vectors, queried through convex
// combination feasibility (never by facet enumeration).
class HullModel {
 public:
  HullModel() = default;
  explicit HullModel(std::vector<CoeffVector> points,
                     double tolerance = kHullTolerance);

  int dimension() const { return static_cast<int>(points_.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(points_.cols()); }
  // One seed per column.
  const Eigen::MatrixXd& points() const { return points_; }
  CoeffVector point(std::size_t k) const {
    return points_.col(static_cast<Eigen::Index>(k));
  }
  double tolerance() const { return tolerance_; }
  CoeffVector centroid() const;
  // True if the seeds span a full-dimensional volume.
  bool full_dimensional() const;
  // Per-coordinate minimum and maximum over the seeds.
  std::pair<CoeffVector, CoeffVector> bounds() const;

  // alpha in hull iff some lambda >= 0, sum 1, with P lambda = alpha, up to
  // an L1 violation of tolerance().
  bool contains(const CoeffVector& alpha) const;

  // Feasible [lo, hi] of coordinate `coord` with the other coordinates held
  // at alpha; std::nullopt if that line misses the hull.
  std::optional<std::pair<double, double>> interval(const CoeffVector& alpha,
                                                    int coord) const;

 private:
  Eigen::MatrixXd points_;
  double tolerance_ = kHullTolerance;
};

bool contains(const HullModel& hull, const CoeffVector& alpha);

struct GibbsOptions {
  int burn_in_sweeps = 100;
  int thinning_sweeps = 5;
};

// Coordinate-wise Gibbs chain approximating the uniform distribution in the
// hull. The chain starts at the centroid; after the burn-in every retained
// sample is followed by `thinning_sweeps` sweeps. Throws ArgumentError on
// a degenerate hull.
std::vector<CoeffVector> gibbs_sample(const HullModel& hull, std::size_t n,
                                      std::uint64_t seed,
                                      const GibbsOptions& options = {});

// Seed coefficients in both spaces.
struct SeedCoefficients {
  CoeffVector alpha5;   // achromatic
  CoeffVector alpha15;  // R, G, B blocks
};

struct Synthesized {
  CoeffVector alpha15;
  std::array<std::size_t, 3> parents{};
  std::array<double, 3> weights{};
};

// Inverse-distance convex combination of the three nearest seeds (distance
// in the 5D space, combination in 15D). A query exactly on a seed returns
// that seed; distance ties go to the lower index.
Synthesized synthesize(const CoeffVector& alpha,
                       std::span<const SeedCoefficients> dataset);

struct ManifestEntry {
  std::string id;
  bool synthesized = false;
  std::array<std::string, 3> parent_ids;
  std::array<double, 3> weights{};
  CoeffVector sample;  // Gibbs point (synthesized entries only)
  CoeffVector alpha5;  // achromatic projection of the stored BRDF
  CoeffVector alpha15;
  std::uint64_t rng_seed = 0;
};

struct Expansion {
  PcaBasis basis;
  HullModel hull;
  std::vector<Brdf> brdfs;  // seeds first, then synthesized
  std::vector<ManifestEntry> manifest;
};

struct ExpandOptions {
  int components = kComponents;
  double epsilon = kDefaultEpsilon;
  double cosine_floor = kDefaultCosineFloor;
  GibbsOptions gibbs;
};

// map -> per-channel projection -> 5D hull -> Gibbs -> synthesize ->
// reconstruct -> unmap. seed_ids may be empty (ids are generated).
Expansion expand_dataset(std::span<const Brdf> seeds,
                         std::span<const std::string> seed_ids,
                         std::size_t target_total, std::uint64_t rng_seed,
                         const ExpandOptions& options = {});

// Manifest JSON {id, parent_ids[3], weights[3], alpha5, alpha15, rng_seed}.
std::string manifest_json(const Expansion& e);
void save_hull(const HullModel& hull, const std::string& basis_hash,
               const std::filesystem::path& path);
// Returns the hull and the basis hash it was recorded against.
std::pair<HullModel, std::string> load_hull(const std::filesystem::path& path);

}  // namespace matspace

#endif  // MATSPACE_SYNTHESIS_H_
