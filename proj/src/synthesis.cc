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

#include "matspace/synthesis.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "matspace/error.h"
#include "matspace/logmap.h"
#include "matspace/simplex.h"

namespace matspace {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Uniform double in [0, 1) from the top 53 bits; identical on every
// standard library.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string numbered(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%03zu", prefix, i);
  return buf;
}

nlohmann::json to_json(const CoeffVector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

HullModel::HullModel(std::vector<CoeffVector> points, double tolerance)
    : tolerance_(tolerance) {
  if (points.empty()) throw ArgumentError("hull needs at least one point");
  const Eigen::Index dim = points.front().size();
  points_.resize(dim, static_cast<Eigen::Index>(points.size()));
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (points[k].size() != dim) {
      throw ArgumentError("hull points have inconsistent dimensions");
    }
    if (!points[k].allFinite()) throw ArgumentError("hull point not finite");
    points_.col(static_cast<Eigen::Index>(k)) = points[k];
  }
  if (!(tolerance > 0.0)) throw ArgumentError("tolerance must be positive");
}

CoeffVector HullModel::centroid() const { return points_.rowwise().mean(); }

bool HullModel::full_dimensional() const {
  if (points_.cols() < points_.rows() + 1) return false;
  const MatrixXd diffs = points_.rightCols(points_.cols() - 1).colwise() -
                         VectorXd(points_.col(0));
  Eigen::JacobiSVD<MatrixXd> svd(diffs);
  const VectorXd& s = svd.singularValues();
  if (s.size() < points_.rows() || s(0) <= 0.0) return false;
  return s(points_.rows() - 1) > 1e-10 * s(0);
}

std::pair<CoeffVector, CoeffVector> HullModel::bounds() const {
  return {points_.rowwise().minCoeff(), points_.rowwise().maxCoeff()};
}

bool HullModel::contains(const CoeffVector& alpha) const {
  if (alpha.size() != points_.rows()) {
    throw ArgumentError("query dimension does not match hull");
  }
  if (!alpha.allFinite()) return false;
  const Eigen::Index d = points_.rows();
  MatrixXd a(d + 1, points_.cols());
  a.topRows(d) = points_;
  a.row(d).setOnes();
  VectorXd b(d + 1);
  b.head(d) = alpha;
  b(d) = 1.0;
  return min_violation(a, b).infeasibility <= tolerance_;
}

std::optional<std::pair<double, double>> HullModel::interval(
    const CoeffVector& alpha, int coord) const {
  const Eigen::Index d = points_.rows();
  if (alpha.size() != d || coord < 0 || coord >= d) {
    throw ArgumentError("bad interval query");
  }
  MatrixXd a(d, points_.cols());
  VectorXd b(d);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (i == coord) continue;
    a.row(r) = points_.row(i);
    b(r) = alpha(i);
    ++r;
  }
  a.row(r).setOnes();
  b(r) = 1.0;
  const VectorXd c = points_.row(coord).transpose();
  const LpResult lo = solve_lp(a, b, c, tolerance_);
  if (lo.status != LpResult::Status::kOptimal) return std::nullopt;
  const LpResult hi = solve_lp(a, b, -c, tolerance_);
  if (hi.status != LpResult::Status::kOptimal) return std::nullopt;
  return std::make_pair(lo.objective, -hi.objective);
}

bool contains(const HullModel& hull, const CoeffVector& alpha) {
  return hull.contains(alpha);
}

std::vector<CoeffVector> gibbs_sample(const HullModel& hull, std::size_t n,
                                      std::uint64_t seed,
                                      const GibbsOptions& options) {
  if (!hull.full_dimensional()) {
    throw ArgumentError("degenerate hull: seeds do not span a volume");
  }
  if (options.burn_in_sweeps < 0 || options.thinning_sweeps < 0) {
    throw ArgumentError("sweep counts must be non-negative");
  }
  std::mt19937_64 rng(seed);
  CoeffVector x = hull.centroid();
  auto sweep = [&] {
    for (int t = 0; t < hull.dimension(); ++t) {
      const auto iv = hull.interval(x, t);
      if (!iv) continue;
      const auto [lo, hi] = *iv;
      const double u = uniform01(rng);
      x(t) = hi > lo ? lo + u * (hi - lo) : 0.5 * (lo + hi);
    }
  };
  for (int s = 0; s < options.burn_in_sweeps; ++s) sweep();
  std::vector<CoeffVector> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    samples.push_back(x);
    for (int s = 0; s < options.thinning_sweeps; ++s) sweep();
  }
  return samples;
}

Synthesized synthesize(const CoeffVector& alpha,
                       std::span<const SeedCoefficients> dataset) {
  if (dataset.size() < 3) {
    throw ArgumentError("synthesis needs at least three seeds");
  }
  std::vector<double> dist(dataset.size());
  for (std::size_t k = 0; k < dataset.size(); ++k) {
    if (dataset[k].alpha5.size() != alpha.size()) {
      throw ArgumentError("seed dimension does not match query");
    }
    dist[k] = (dataset[k].alpha5 - alpha).norm();
  }
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return dist[i] < dist[j]; });

  Synthesized out;
  for (int j = 0; j < 3; ++j) out.parents[j] = order[j];
  if (dist[order[0]] == 0.0) {
    out.weights = {1.0, 0.0, 0.0};
    out.alpha15 = dataset[order[0]].alpha15;
    return out;
  }
  double total = 0.0;
  for (int j = 0; j < 3; ++j) {
    out.weights[j] = 1.0 / dist[order[j]];
    total += out.weights[j];
  }
  out.alpha15 = CoeffVector::Zero(dataset[order[0]].alpha15.size());
  for (int j = 0; j < 3; ++j) {
    out.weights[j] /= total;
    out.alpha15 += out.weights[j] * dataset[order[j]].alpha15;
  }
  return out;
}

Expansion expand_dataset(std::span<const Brdf> seeds,
                         std::span<const std::string> seed_ids,
                         std::size_t target_total, std::uint64_t rng_seed,
                         const ExpandOptions& options) {
  if (seeds.empty()) throw ArgumentError("no seed BRDFs");
  if (target_total < seeds.size()) {
    throw ArgumentError("target total is smaller than the seed count");
  }
  if (!seed_ids.empty() && seed_ids.size() != seeds.size()) {
    throw ArgumentError("seed id count does not match seed count");
  }

  std::vector<Brdf> achromatic;
  achromatic.reserve(seeds.size());
  for (const Brdf& s : seeds) achromatic.push_back(achromatic_of(s));
  const ReferenceBrdf ref =
      compute_reference(achromatic, options.epsilon, options.cosine_floor);

  std::vector<MappedBrdf> mapped;
  mapped.reserve(seeds.size());
  for (const Brdf& y : achromatic) mapped.push_back(map_brdf(y, ref));
  achromatic.clear();

  Expansion e;
  e.basis = fit_basis(mapped, options.components, ref);

  std::vector<SeedCoefficients> coeffs(seeds.size());
  std::vector<CoeffVector> hull_points;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    coeffs[k].alpha5 = project(e.basis, mapped[k]);
    coeffs[k].alpha15 = project(e.basis, map_brdf(seeds[k], ref));
    hull_points.push_back(coeffs[k].alpha5);
  }
  mapped.clear();
  e.hull = HullModel(hull_points);

  e.brdfs.assign(seeds.begin(), seeds.end());
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    ManifestEntry m;
    m.id = seed_ids.empty() ? numbered("seed", k) : seed_ids[k];
    m.alpha5 = coeffs[k].alpha5;
    m.alpha15 = coeffs[k].alpha15;
    m.rng_seed = rng_seed;
    e.manifest.push_back(std::move(m));
  }

  const std::size_t n_new = target_total - seeds.size();
  if (n_new == 0) return e;

  const std::vector<CoeffVector> samples =
      gibbs_sample(e.hull, n_new, rng_seed, options.gibbs);
  for (std::size_t i = 0; i < n_new; ++i) {
    const Synthesized s = synthesize(samples[i], coeffs);
    Brdf brdf = unmap_brdf(reconstruct(e.basis, s.alpha15), ref);
    ManifestEntry m;
    m.id = numbered("synth", i);
    m.synthesized = true;
    for (int j = 0; j < 3; ++j) {
      m.parent_ids[j] = e.manifest[s.parents[j]].id;
      m.weights[j] = s.weights[j];
    }
    m.sample = samples[i];
    m.alpha5 = project(e.basis, map_brdf(achromatic_of(brdf), ref));
    m.alpha15 = s.alpha15;
    m.rng_seed = rng_seed;
    e.brdfs.push_back(std::move(brdf));
    e.manifest.push_back(std::move(m));
  }
  return e;
}

std::string manifest_json(const Expansion& e) {
  nlohmann::json entries = nlohmann::json::array();
  for (const ManifestEntry& m : e.manifest) {
    nlohmann::json j;
    j["id"] = m.id;
    j["origin"] = m.synthesized ? "synthesized" : "seed";
    if (m.synthesized) {
      j["parent_ids"] = m.parent_ids;
      j["weights"] = m.weights;
      j["sample"] = to_json(m.sample);
    } else {
      j["parent_ids"] = nlohmann::json::array();
      j["weights"] = nlohmann::json::array();
    }
    j["alpha5"] = to_json(m.alpha5);
    j["alpha15"] = to_json(m.alpha15);
    j["rng_seed"] = m.rng_seed;
    entries.push_back(std::move(j));
  }
  nlohmann::json root;
  root["basis_hash"] = e.basis.basis_hash();
  root["materials"] = std::move(entries);
  return root.dump(2);
}

void save_hull(const HullModel& hull, const std::string& basis_hash,
               const std::filesystem::path& path) {
  nlohmann::json j;
  j["basis_hash"] = basis_hash;
  j["tolerance"] = hull.tolerance();
  nlohmann::json pts = nlohmann::json::array();
  for (std::size_t k = 0; k < hull.size(); ++k) pts.push_back(to_json(hull.point(k)));
  j["points"] = std::move(pts);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

std::pair<HullModel, std::string> load_hull(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    std::vector<CoeffVector> pts;
    for (const auto& p : j.at("points")) {
      const auto v = p.get<std::vector<double>>();
      pts.push_back(Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
    return {HullModel(std::move(pts), j.at("tolerance").get<double>()),
            j.at("basis_hash").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad hull file: ") + e.what());
  }
}

}  // namespace matspace
