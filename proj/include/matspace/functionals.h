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

#ifndef MATSPACE_FUNCTIONALS_H_
#define MATSPACE_FUNCTIONALS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "matspace/pca_basis.h"
#include "matspace/ratings.h"

namespace matspace {

inline constexpr int kDefaultCenters = 10;
// Fraction of each stratum used for training (325 of 400).
inline constexpr double kTrainFraction = 325.0 / 400.0;

struct KMeansResult {
  std::vector<CoeffVector> centers;
  double sse = 0.0;
  // Within-cluster SSE after every Lloyd update of the winning restart.
  std::vector<double> sse_history;
};

// k-means++ seeding, Lloyd iterations until the assignment is a fixed point
// (at most max_iterations), best of `restarts` runs by SSE. Throws
// ArgumentError when there are fewer distinct points than centers.
KMeansResult kmeans(std::span<const CoeffVector> points, int n_centers,
                    std::uint64_t seed, int restarts = 10,
                    int max_iterations = 200);
std::vector<CoeffVector> kmeans_centers(std::span<const CoeffVector> points,
                                        int n_centers, std::uint64_t seed);

struct TrainReport {
  double mse_train = 0.0;
  double mse_validation = 0.0;  // NaN without a validation split
  std::vector<double> beta_grid;
  std::vector<double> grid_mse;  // selection score per grid entry
  double chosen_beta = 0.0;
  std::size_t n_train = 0;
  std::size_t n_validation = 0;
};

// phi(alpha) = sum_i theta_i exp(-beta |alpha - c_i|^2).
struct RbfModel {
  int attribute = 0;
  std::vector<CoeffVector> centers;
  double beta = 1.0;
  Eigen::VectorXd weights;
  std::string basis_hash;
  TrainReport report;

  int n_centers() const { return static_cast<int>(centers.size()); }
  int dimension() const {
    return centers.empty() ? 0 : static_cast<int>(centers.front().size());
  }
  // Throws ArgumentError if the fields are inconsistent.
  void validate() const;
};

struct TrainOptions {
  int n_centers = kDefaultCenters;
  std::uint64_t seed = 0;
  double train_fraction = kTrainFraction;
  double ridge = 1e-8;
  // Optional stratum label per sample (e.g. 0 = seed, 1 = synthesized).
  std::vector<int> strata;
  int attribute = 0;
  std::string basis_hash;
};

// Centers from k-means on the training split; for each beta on the grid
// 2^k / (2 sigma^2), k = -6..6 (sigma = mean pairwise center distance),
// theta solves the ridge least-squares problem on the training split. The
// beta with the lowest validation MSE wins (training MSE without a
// validation split).
RbfModel train(std::span<const CoeffVector> alphas,
               std::span<const double> targets, const TrainOptions& options);

double eval_raw(const RbfModel& model, const CoeffVector& alpha);
// Clamped to [0, 1] for display.
double eval(const RbfModel& model, const CoeffVector& alpha);
// Throws CompatibilityError when basis_hash differs from the model's.
double eval(const RbfModel& model, const CoeffVector& alpha,
            std::string_view basis_hash);
Eigen::VectorXd grad(const RbfModel& model, const CoeffVector& alpha);
void check_compatible(const RbfModel& model, std::string_view basis_hash);

// Mean squared error of raw predictions.
double fit_mse(const RbfModel& model, std::span<const CoeffVector> alphas,
               std::span<const double> targets);

// Axis-aligned 2D slice through the coefficient space. Dims are 0-based;
// every other coordinate comes from `anchor`.
struct SliceSpec {
  int dim_x = 0;
  int dim_y = 1;
  CoeffVector anchor;
  double x_min = -1.0, x_max = 1.0;
  double y_min = -1.0, y_max = 1.0;
  int nx = 64;
  int ny = 64;

  void validate(int dimension) const;
  double x(int col) const;
  double y(int row) const;
  CoeffVector point(int col, int row) const;
};

// Raw values; rows follow dim_y ascending, columns dim_x ascending.
Eigen::MatrixXd slice(const RbfModel& model, const SliceSpec& spec);

// A contour in slice coordinates (x, y). Closed loops repeat their first
// vertex at the end; open polylines end on the slice boundary.
using Polyline = std::vector<Eigen::Vector2d>;

// Marching squares on the slice grid; every crossing is refined by
// bisection on the true functional along its cell edge. A level outside
// the grid range gives an empty result.
std::vector<Polyline> isocontour(const RbfModel& model, const SliceSpec& spec,
                                 double level);

// Model JSON {attribute, n_centers, beta, centers, weights, basis_hash,
// train_report}.
std::string model_to_json(const RbfModel& model);
RbfModel model_from_json(std::string_view text);
// One file per attribute plus manifest.json.
void save_models(std::span<const RbfModel> models,
                 const std::filesystem::path& dir);
std::vector<RbfModel> load_models(const std::filesystem::path& dir);
// File name used for an attribute's model ("plastic-like.json", ...).
std::string model_file_name(int attribute);

// Trains one model per attribute on the MOS of every BRDF that has both
// coefficients and ratings. Attributes use seed + attribute index.
std::vector<RbfModel> train_all(const RatingsTable& ratings,
                                const std::map<std::string, CoeffVector>& alphas,
                                const std::map<std::string, int>& strata,
                                const TrainOptions& options);

// Mean |rating - prediction| per participant on the normalised scale over
// BRDFs with known coefficients.
std::map<std::string, double> per_user_mean_distance(
    const RbfModel& model, const RatingsTable& ratings,
    const std::map<std::string, CoeffVector>& alphas);

}  // namespace matspace

#endif  // MATSPACE_FUNCTIONALS_H_
