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

#include "matspace/functionals.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <unordered_map>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "matspace/error.h"

namespace matspace {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
}

void check_points(std::span<const CoeffVector> points) {
  if (points.empty()) throw ArgumentError("no points");
  for (const auto& p : points) {
    if (p.size() != points.front().size() || p.size() == 0) {
      throw ArgumentError("points have inconsistent dimensions");
    }
    if (!p.allFinite()) throw ArgumentError("point is not finite");
  }
}

std::size_t count_distinct(std::span<const CoeffVector> points) {
  std::vector<std::vector<double>> keys;
  keys.reserve(points.size());
  for (const auto& p : points) keys.emplace_back(p.data(), p.data() + p.size());
  std::sort(keys.begin(), keys.end());
  return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

std::vector<int> assign(std::span<const CoeffVector> points,
                        const std::vector<CoeffVector>& centers) {
  std::vector<int> labels(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const double d = (points[i] - centers[k]).squaredNorm();
      if (d < best) {
        best = d;
        labels[i] = static_cast<int>(k);
      }
    }
  }
  return labels;
}

double sse_of(std::span<const CoeffVector> points,
              const std::vector<CoeffVector>& centers,
              const std::vector<int>& labels) {
  double s = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    s += (points[i] - centers[static_cast<std::size_t>(labels[i])]).squaredNorm();
  }
  return s;
}

// Empty clusters keep their previous center.
void update(std::span<const CoeffVector> points, const std::vector<int>& labels,
            std::vector<CoeffVector>& centers) {
  std::vector<CoeffVector> sums(centers.size(),
                                CoeffVector::Zero(centers.front().size()));
  std::vector<int> counts(centers.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    sums[static_cast<std::size_t>(labels[i])] += points[i];
    ++counts[static_cast<std::size_t>(labels[i])];
  }
  for (std::size_t k = 0; k < centers.size(); ++k) {
    if (counts[k] > 0) centers[k] = sums[k] / counts[k];
  }
}

std::vector<CoeffVector> plus_plus_init(std::span<const CoeffVector> points,
                                        int k, std::mt19937_64& rng) {
  std::vector<CoeffVector> centers;
  centers.push_back(points[uniform_index(rng, points.size())]);
  std::vector<double> d2(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    d2[i] = (points[i] - centers[0]).squaredNorm();
  }
  while (static_cast<int>(centers.size()) < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    const double u = uniform01(rng) * total;
    double acc = 0.0;
    std::size_t pick = points.size();
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (d2[i] <= 0.0) continue;
      acc += d2[i];
      pick = i;
      if (acc > u) break;
    }
    centers.push_back(points[pick]);
    for (std::size_t i = 0; i < points.size(); ++i) {
      d2[i] = std::min(d2[i], (points[i] - centers.back()).squaredNorm());
    }
  }
  return centers;
}

MatrixXd design(std::span<const CoeffVector> alphas,
                const std::vector<CoeffVector>& centers, double beta,
                const std::vector<std::size_t>& rows) {
  MatrixXd phi(static_cast<Eigen::Index>(rows.size()),
               static_cast<Eigen::Index>(centers.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t k = 0; k < centers.size(); ++k) {
      phi(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
          std::exp(-beta * (alphas[rows[r]] - centers[k]).squaredNorm());
    }
  }
  return phi;
}

double subset_mse(std::span<const CoeffVector> alphas,
                  std::span<const double> targets,
                  const std::vector<CoeffVector>& centers, double beta,
                  const VectorXd& theta, const std::vector<std::size_t>& rows) {
  if (rows.empty()) return kNaN;
  const VectorXd pred = design(alphas, centers, beta, rows) * theta;
  double s = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double e = pred(static_cast<Eigen::Index>(r)) - targets[rows[r]];
    s += e * e;
  }
  return s / static_cast<double>(rows.size());
}

// Stratified shuffle split; returns (train, validation) index lists.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, const std::vector<int>& strata, double fraction,
    std::mt19937_64& rng) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[strata.empty() ? 0 : strata[i]].push_back(i);
  std::vector<std::size_t> train, validation;
  for (auto& [label, idx] : groups) {
    for (std::size_t i = idx.size(); i > 1; --i) {
      std::swap(idx[i - 1], idx[uniform_index(rng, i)]);
    }
    const auto n_train = static_cast<std::size_t>(
        std::lround(fraction * static_cast<double>(idx.size())));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      (i < n_train ? train : validation).push_back(idx[i]);
    }
  }
  std::sort(train.begin(), train.end());
  std::sort(validation.begin(), validation.end());
  return {train, validation};
}

nlohmann::json vec_json(const VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

VectorXd json_vec(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double json_number(const nlohmann::json& j) {
  return j.is_null() ? kNaN : j.get<double>();
}

nlohmann::json number_json(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

KMeansResult kmeans(std::span<const CoeffVector> points, int n_centers,
                    std::uint64_t seed, int restarts, int max_iterations) {
  check_points(points);
  if (n_centers < 1) throw ArgumentError("need at least one center");
  if (count_distinct(points) < static_cast<std::size_t>(n_centers)) {
    throw ArgumentError("fewer distinct points than centers");
  }
  std::mt19937_64 master(seed);
  KMeansResult best;
  best.sse = std::numeric_limits<double>::infinity();
  for (int run = 0; run < std::max(restarts, 1); ++run) {
    std::mt19937_64 rng(master());
    KMeansResult r;
    r.centers = plus_plus_init(points, n_centers, rng);
    std::vector<int> labels = assign(points, r.centers);
    r.sse_history.push_back(sse_of(points, r.centers, labels));
    for (int it = 0; it < max_iterations; ++it) {
      update(points, labels, r.centers);
      std::vector<int> next = assign(points, r.centers);
      r.sse_history.push_back(sse_of(points, r.centers, next));
      const bool fixed = next == labels;
      labels = std::move(next);
      if (fixed) break;
    }
    r.sse = r.sse_history.back();
    if (r.sse < best.sse) best = std::move(r);
  }
  return best;
}

std::vector<CoeffVector> kmeans_centers(std::span<const CoeffVector> points,
                                        int n_centers, std::uint64_t seed) {
  return kmeans(points, n_centers, seed).centers;
}

void RbfModel::validate() const {
  if (centers.empty()) throw ArgumentError("model has no centers");
  if (weights.size() != n_centers()) {
    throw ArgumentError("weights and centers differ in count");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ArgumentError("beta must be positive");
  for (const auto& c : centers) {
    if (c.size() != dimension() || !c.allFinite()) {
      throw ArgumentError("bad center");
    }
  }
  if (!weights.allFinite()) throw ArgumentError("weights not finite");
}

RbfModel train(std::span<const CoeffVector> alphas,
               std::span<const double> targets, const TrainOptions& options) {
  check_points(alphas);
  if (alphas.size() != targets.size()) {
    throw ArgumentError("alphas and targets differ in length");
  }
  if (!options.strata.empty() && options.strata.size() != alphas.size()) {
    throw ArgumentError("strata and alphas differ in length");
  }
  if (alphas.size() < static_cast<std::size_t>(options.n_centers)) {
    throw ArgumentError("fewer samples than centers");
  }
  for (double t : targets) {
    if (!std::isfinite(t)) throw ArgumentError("target not finite");
  }

  std::mt19937_64 rng(options.seed);
  auto [train_rows, val_rows] =
      split_indices(alphas.size(), options.strata, options.train_fraction, rng);
  std::vector<CoeffVector> train_points;
  for (std::size_t i : train_rows) train_points.push_back(alphas[i]);
  if (train_points.size() < static_cast<std::size_t>(options.n_centers) ||
      count_distinct(train_points) < static_cast<std::size_t>(options.n_centers)) {
    train_rows.resize(alphas.size());
    std::iota(train_rows.begin(), train_rows.end(), 0);
    val_rows.clear();
    train_points.assign(alphas.begin(), alphas.end());
  }

  RbfModel model;
  model.attribute = options.attribute;
  model.basis_hash = options.basis_hash;
  model.centers = kmeans_centers(train_points, options.n_centers, options.seed);

  double sigma = 0.0;
  int pairs = 0;
  for (std::size_t a = 0; a < model.centers.size(); ++a) {
    for (std::size_t b = a + 1; b < model.centers.size(); ++b) {
      sigma += (model.centers[a] - model.centers[b]).norm();
      ++pairs;
    }
  }
  sigma = pairs > 0 ? sigma / pairs : 0.0;
  if (!(sigma > 0.0) || !std::isfinite(sigma)) sigma = 1.0;

  VectorXd y(static_cast<Eigen::Index>(train_rows.size()));
  for (std::size_t r = 0; r < train_rows.size(); ++r) {
    y(static_cast<Eigen::Index>(r)) = targets[train_rows[r]];
  }
  const Eigen::Index k = static_cast<Eigen::Index>(model.centers.size());
  const std::vector<std::size_t>& score_rows = val_rows.empty() ? train_rows : val_rows;

  TrainReport& report = model.report;
  double best = std::numeric_limits<double>::infinity();
  for (int e = -6; e <= 6; ++e) {
    const double beta = std::ldexp(1.0, e) / (2.0 * sigma * sigma);
    const MatrixXd phi = design(alphas, model.centers, beta, train_rows);
    MatrixXd aug(phi.rows() + k, k);
    aug.topRows(phi.rows()) = phi;
    aug.bottomRows(k) = std::sqrt(options.ridge) * MatrixXd::Identity(k, k);
    VectorXd rhs = VectorXd::Zero(phi.rows() + k);
    rhs.head(phi.rows()) = y;
    const VectorXd theta = aug.colPivHouseholderQr().solve(rhs);
    if (!theta.allFinite()) {
      throw NumericError("RBF least-squares solve produced non-finite weights");
    }
    const double score =
        subset_mse(alphas, targets, model.centers, beta, theta, score_rows);
    report.beta_grid.push_back(beta);
    report.grid_mse.push_back(score);
    if (score < best) {
      best = score;
      model.beta = beta;
      model.weights = theta;
    }
  }
  if (model.weights.size() == 0) {
    throw NumericError("no beta on the grid gave a finite fit");
  }
  report.chosen_beta = model.beta;
  report.n_train = train_rows.size();
  report.n_validation = val_rows.size();
  report.mse_train =
      subset_mse(alphas, targets, model.centers, model.beta, model.weights, train_rows);
  report.mse_validation =
      subset_mse(alphas, targets, model.centers, model.beta, model.weights, val_rows);
  return model;
}

double eval_raw(const RbfModel& model, const CoeffVector& alpha) {
  if (alpha.size() != model.dimension()) {
    throw ArgumentError("coefficient dimension does not match the model");
  }
  double y = 0.0;
  for (std::size_t i = 0; i < model.centers.size(); ++i) {
    y += model.weights(static_cast<Eigen::Index>(i)) *
         std::exp(-model.beta * (alpha - model.centers[i]).squaredNorm());
  }
  return y;
}

double eval(const RbfModel& model, const CoeffVector& alpha) {
  return std::clamp(eval_raw(model, alpha), 0.0, 1.0);
}

void check_compatible(const RbfModel& model, std::string_view basis_hash) {
  if (model.basis_hash != basis_hash) {
    throw CompatibilityError("model was trained on basis " + model.basis_hash +
                             ", coefficients come from " + std::string(basis_hash));
  }
}

double eval(const RbfModel& model, const CoeffVector& alpha,
            std::string_view basis_hash) {
  check_compatible(model, basis_hash);
  return eval(model, alpha);
}

VectorXd grad(const RbfModel& model, const CoeffVector& alpha) {
  if (alpha.size() != model.dimension()) {
    throw ArgumentError("coefficient dimension does not match the model");
  }
  VectorXd g = VectorXd::Zero(alpha.size());
  for (std::size_t i = 0; i < model.centers.size(); ++i) {
    const VectorXd d = alpha - model.centers[i];
    g += (model.weights(static_cast<Eigen::Index>(i)) *
          std::exp(-model.beta * d.squaredNorm()) * -2.0 * model.beta) *
         d;
  }
  return g;
}

double fit_mse(const RbfModel& model, std::span<const CoeffVector> alphas,
               std::span<const double> targets) {
  if (alphas.size() != targets.size() || alphas.empty()) {
    throw ArgumentError("alphas and targets must be aligned and non-empty");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double e = eval_raw(model, alphas[i]) - targets[i];
    s += e * e;
  }
  return s / static_cast<double>(alphas.size());
}

void SliceSpec::validate(int dimension) const {
  if (dim_x < 0 || dim_y < 0 || dim_x >= dimension || dim_y >= dimension ||
      dim_x == dim_y) {
    throw ArgumentError("slice dims must be distinct coordinates");
  }
  if (anchor.size() != dimension) throw ArgumentError("slice anchor has wrong size");
  if (nx < 2 || ny < 2) throw ArgumentError("slice grid needs at least 2x2 nodes");
  if (!(x_max > x_min) || !(y_max > y_min)) throw ArgumentError("empty slice bounds");
}

double SliceSpec::x(int col) const {
  return x_min + (x_max - x_min) * col / (nx - 1);
}

double SliceSpec::y(int row) const {
  return y_min + (y_max - y_min) * row / (ny - 1);
}

CoeffVector SliceSpec::point(int col, int row) const {
  CoeffVector p = anchor;
  p(dim_x) = x(col);
  p(dim_y) = y(row);
  return p;
}

MatrixXd slice(const RbfModel& model, const SliceSpec& spec) {
  spec.validate(model.dimension());
  MatrixXd grid(spec.ny, spec.nx);
  for (int r = 0; r < spec.ny; ++r) {
    for (int c = 0; c < spec.nx; ++c) grid(r, c) = eval_raw(model, spec.point(c, r));
  }
  return grid;
}

std::vector<Polyline> isocontour(const RbfModel& model, const SliceSpec& spec,
                                 double level) {
  const MatrixXd g = slice(model, spec);
  if (!(level >= g.minCoeff() && level <= g.maxCoeff())) return {};
  const int nx = spec.nx;

  auto above = [&](int r, int c) { return g(r, c) >= level; };
  // Edge keys: horizontal edge from node (r, c) to (r, c+1) is 2*(r*nx+c);
  // vertical edge from (r, c) to (r+1, c) is 2*(r*nx+c)+1.
  auto hkey = [&](int r, int c) { return 2L * (static_cast<long>(r) * nx + c); };
  auto vkey = [&](int r, int c) { return 2L * (static_cast<long>(r) * nx + c) + 1; };

  std::unordered_map<long, Eigen::Vector2d> vertices;
  auto crossing = [&](long key) {
    const auto it = vertices.find(key);
    if (it != vertices.end()) return;
    const long node = key / 2;
    const int r0 = static_cast<int>(node / nx);
    const int c0 = static_cast<int>(node % nx);
    const int r1 = (key & 1) ? r0 + 1 : r0;
    const int c1 = (key & 1) ? c0 : c0 + 1;
    const CoeffVector pa = spec.point(c0, r0);
    const CoeffVector pb = spec.point(c1, r1);
    const double fa = g(r0, c0) - level;
    double lo = 0.0, hi = 1.0;  // f(lo) on the side of fa
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = eval_raw(model, pa + mid * (pb - pa)) - level;
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm >= 0.0) == (fa >= 0.0)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double t = 0.5 * (lo + hi);
    const CoeffVector p = pa + t * (pb - pa);
    vertices.emplace(key, Eigen::Vector2d(p(spec.dim_x), p(spec.dim_y)));
  };

  std::vector<std::pair<long, long>> segments;
  for (int r = 0; r + 1 < spec.ny; ++r) {
    for (int c = 0; c + 1 < nx; ++c) {
      const bool b0 = above(r, c), b1 = above(r, c + 1);
      const bool b2 = above(r + 1, c + 1), b3 = above(r + 1, c);
      const long e0 = hkey(r, c), e1 = vkey(r, c + 1);
      const long e2 = hkey(r + 1, c), e3 = vkey(r, c);
      std::vector<long> crossed;
      if (b0 != b1) crossed.push_back(e0);
      if (b1 != b2) crossed.push_back(e1);
      if (b2 != b3) crossed.push_back(e2);
      if (b3 != b0) crossed.push_back(e3);
      if (crossed.empty()) continue;
      for (long e : crossed) crossing(e);
      if (crossed.size() == 2) {
        segments.emplace_back(crossed[0], crossed[1]);
        continue;
      }
      // Saddle: the centre value decides which diagonal pair is joined.
      const double centre =
          0.25 * (g(r, c) + g(r, c + 1) + g(r + 1, c + 1) + g(r + 1, c));
      const bool centre_above = centre >= level;
      // Isolate the corners whose class differs from the centre.
      if (b0 != centre_above) {  // v0 and v2 isolated
        segments.emplace_back(e3, e0);
        segments.emplace_back(e1, e2);
      } else {  // v1 and v3 isolated
        segments.emplace_back(e0, e1);
        segments.emplace_back(e2, e3);
      }
    }
  }

  std::unordered_map<long, std::vector<std::size_t>> touching;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    touching[segments[s].first].push_back(s);
    touching[segments[s].second].push_back(s);
  }
  std::vector<bool> used(segments.size(), false);
  std::vector<Polyline> out;
  auto trace = [&](long start) {
    Polyline line{vertices.at(start)};
    long at = start;
    for (;;) {
      std::size_t next = segments.size();
      for (std::size_t s : touching[at]) {
        if (!used[s]) {
          next = s;
          break;
        }
      }
      if (next == segments.size()) break;
      used[next] = true;
      at = segments[next].first == at ? segments[next].second : segments[next].first;
      line.push_back(vertices.at(at));
      if (at == start) break;
    }
    out.push_back(std::move(line));
  };
  // Open polylines start at boundary edges (one touching segment).
  std::vector<long> ends;
  for (const auto& [key, segs] : touching) {
    if (segs.size() == 1) ends.push_back(key);
  }
  std::sort(ends.begin(), ends.end());
  for (long key : ends) {
    if (!used[touching[key].front()]) trace(key);
  }
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (!used[s]) trace(segments[s].first);
  }
  return out;
}

std::string model_to_json(const RbfModel& model) {
  nlohmann::json j;
  j["attribute"] = std::string(attribute_names()[static_cast<std::size_t>(model.attribute)]);
  j["n_centers"] = model.n_centers();
  j["beta"] = model.beta;
  nlohmann::json centers = nlohmann::json::array();
  for (const auto& c : model.centers) centers.push_back(vec_json(c));
  j["centers"] = std::move(centers);
  j["weights"] = vec_json(model.weights);
  j["basis_hash"] = model.basis_hash;
  const TrainReport& r = model.report;
  j["train_report"] = {
      {"mse_train", number_json(r.mse_train)},
      {"mse_validation", number_json(r.mse_validation)},
      {"beta_grid", r.beta_grid},
      {"grid_mse", [&] {
         nlohmann::json a = nlohmann::json::array();
         for (double v : r.grid_mse) a.push_back(number_json(v));
         return a;
       }()},
      {"chosen_beta", r.chosen_beta},
      {"n_train", r.n_train},
      {"n_validation", r.n_validation}};
  return j.dump(2);
}

RbfModel model_from_json(std::string_view text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    RbfModel m;
    m.attribute = attribute_id(j.at("attribute").get<std::string>()).index;
    m.beta = j.at("beta").get<double>();
    for (const auto& c : j.at("centers")) m.centers.push_back(json_vec(c));
    m.weights = json_vec(j.at("weights"));
    m.basis_hash = j.at("basis_hash").get<std::string>();
    if (j.at("n_centers").get<int>() != m.n_centers()) {
      throw FormatError("n_centers does not match the centers list");
    }
    if (j.contains("train_report")) {
      const auto& r = j["train_report"];
      m.report.mse_train = json_number(r.at("mse_train"));
      m.report.mse_validation = json_number(r.at("mse_validation"));
      m.report.beta_grid = r.at("beta_grid").get<std::vector<double>>();
      for (const auto& v : r.at("grid_mse")) m.report.grid_mse.push_back(json_number(v));
      m.report.chosen_beta = r.at("chosen_beta").get<double>();
      m.report.n_train = r.value("n_train", std::size_t{0});
      m.report.n_validation = r.value("n_validation", std::size_t{0});
    }
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad model JSON: ") + e.what());
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("bad model: ") + e.what());
  }
}

std::string model_file_name(int attribute) {
  std::string name(attribute_id(attribute).name);
  std::replace(name.begin(), name.end(), ' ', '_');
  return name + ".json";
}

void save_models(std::span<const RbfModel> models,
                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  nlohmann::json list = nlohmann::json::array();
  for (const RbfModel& m : models) {
    const std::string file = model_file_name(m.attribute);
    std::ofstream out(dir / file);
    if (!out) throw IoError("cannot write " + (dir / file).string());
    out << model_to_json(m) << '\n';
    list.push_back({{"attribute", std::string(attribute_names()[m.attribute])},
                    {"file", file}});
  }
  manifest["models"] = std::move(list);
  manifest["basis_hash"] = models.empty() ? "" : models.front().basis_hash;
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

std::vector<RbfModel> load_models(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IoError("no manifest.json in " + dir.string());
  std::vector<RbfModel> models;
  try {
    const nlohmann::json manifest = nlohmann::json::parse(in);
    for (const auto& entry : manifest.at("models")) {
      const auto path = dir / entry.at("file").get<std::string>();
      std::ifstream f(path);
      if (!f) throw IoError("cannot open " + path.string());
      const std::string text((std::istreambuf_iterator<char>(f)), {});
      models.push_back(model_from_json(text));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad model manifest: ") + e.what());
  }
  return models;
}

std::vector<RbfModel> train_all(const RatingsTable& ratings,
                                const std::map<std::string, CoeffVector>& alphas,
                                const std::map<std::string, int>& strata,
                                const TrainOptions& options) {
  const MosMatrix mos = mos_matrix(ratings);
  std::vector<RbfModel> models;
  for (int a = 0; a < kAttributeCount; ++a) {
    std::vector<CoeffVector> x;
    std::vector<double> y;
    TrainOptions opts = options;
    opts.attribute = a;
    opts.seed = options.seed + static_cast<std::uint64_t>(a);
    opts.strata.clear();
    for (std::size_t i = 0; i < mos.brdf_ids.size(); ++i) {
      const double v = mos.values(static_cast<Eigen::Index>(i), a);
      const auto it = alphas.find(mos.brdf_ids[i]);
      if (std::isnan(v) || it == alphas.end()) continue;
      x.push_back(it->second);
      y.push_back(v);
      const auto s = strata.find(mos.brdf_ids[i]);
      opts.strata.push_back(s == strata.end() ? 0 : s->second);
    }
    if (x.size() < static_cast<std::size_t>(options.n_centers)) {
      throw MissingDataError("too few rated BRDFs with coefficients for " +
                             std::string(attribute_names()[a]));
    }
    models.push_back(train(x, y, opts));
  }
  return models;
}

std::map<std::string, double> per_user_mean_distance(
    const RbfModel& model, const RatingsTable& ratings,
    const std::map<std::string, CoeffVector>& alphas) {
  std::map<std::string, std::pair<double, long>> acc;
  std::map<std::string, double> cache;
  for (const auto& r : ratings.records()) {
    if (r.attribute != model.attribute) continue;
    const auto it = alphas.find(r.brdf_id);
    if (it == alphas.end()) continue;
    auto c = cache.find(r.brdf_id);
    if (c == cache.end()) c = cache.emplace(r.brdf_id, eval_raw(model, it->second)).first;
    auto& [sum, n] = acc[r.participant_id];
    sum += std::abs((r.rating - 1) / 4.0 - c->second);
    ++n;
  }
  std::map<std::string, double> out;
  for (const auto& [p, sn] : acc) out[p] = sn.first / static_cast<double>(sn.second);
  return out;
}

}  // namespace matspace
