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

#include "matspace/pca_basis.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "binary_io.h"
#include "matspace/digest.h"
#include "matspace/error.h"

namespace matspace {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr char kBasisFormat[] = "matspace-basis";
constexpr int kBasisVersion = 1;

MatrixXd pseudo_inverse_spd(const MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
  const VectorXd& ev = es.eigenvalues();
  const double cutoff =
      1e-12 * std::max(ev.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  VectorXd inv(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    inv(i) = ev(i) > cutoff ? 1.0 / ev(i) : 0.0;
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

std::string hash_basis(const VectorXd& mean, const MatrixXd& q,
                       const VectorXd& eigenvalues,
                       const std::optional<ReferenceBrdf>& ref) {
  Sha256 h;
  h.update(kBasisFormat);
  const std::int64_t dims[2] = {mean.size(), q.cols()};
  h.update_values(std::span<const std::int64_t>(dims));
  h.update_values(std::span<const double>(mean.data(), mean.size()));
  h.update_values(std::span<const double>(q.data(), q.size()));
  h.update_values(std::span<const double>(eigenvalues.data(), eigenvalues.size()));
  if (ref) {
    const std::int64_t meta[4] = {ref->shape.theta_h, ref->shape.theta_d,
                                  ref->shape.phi_d, ref->channels};
    h.update_values(std::span<const std::int64_t>(meta));
    const double params[2] = {ref->epsilon, ref->cosine_floor};
    h.update_values(std::span<const double>(params));
    h.update_values(std::span<const double>(ref->median));
  }
  return h.hex();
}

// CIE 1976 L*a*b* helpers (D65, sRGB primaries).
constexpr double kDelta = 6.0 / 29.0;

double lab_f(double t) {
  return t > kDelta * kDelta * kDelta ? std::cbrt(t)
                                      : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

double lab_f_inv(double f) {
  return f > kDelta ? f * f * f : 3.0 * kDelta * kDelta * (f - 4.0 / 29.0);
}

const Eigen::Matrix3d& rgb_to_xyz() {
  static const Eigen::Matrix3d m = [] {
    Eigen::Matrix3d r;
    r << 0.4124564, 0.3575761, 0.1804375,  //
        0.2126729, 0.7151522, 0.0721750,   //
        0.0193339, 0.1191920, 0.9503041;
    return r;
  }();
  return m;
}

const Eigen::Matrix3d& xyz_to_rgb() {
  static const Eigen::Matrix3d m = rgb_to_xyz().inverse();
  return m;
}

// Reference white: the XYZ of RGB (1, 1, 1), so grey has zero chroma.
const Eigen::Vector3d& white() {
  static const Eigen::Vector3d w = rgb_to_xyz() * Eigen::Vector3d::Ones();
  return w;
}

}  // namespace

PcaBasis::PcaBasis(VectorXd mean, MatrixXd q, VectorXd eigenvalues,
                   std::optional<ReferenceBrdf> reference)
    : mean_(std::move(mean)),
      q_(std::move(q)),
      eigenvalues_(std::move(eigenvalues)),
      reference_(std::move(reference)) {
  if (q_.rows() != mean_.size() || eigenvalues_.size() != q_.cols()) {
    throw ArgumentError("inconsistent basis dimensions");
  }
  if (reference_) {
    reference_->validate();
    if (static_cast<Eigen::Index>(reference_->bins()) != mean_.size()) {
      throw ArgumentError("reference shape does not match basis dimension");
    }
  }
  gram_pinv_ = pseudo_inverse_spd(q_.transpose() * q_);
  hash_ = hash_basis(mean_, q_, eigenvalues_, reference_);
}

MatrixXd PcaBasis::directions() const {
  MatrixXd u = q_;
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    if (eigenvalues_(k) > 0.0) u.col(k) /= eigenvalues_(k);
  }
  return u;
}

CoeffVector PcaBasis::project(std::span<const double> values) const {
  if (static_cast<Eigen::Index>(values.size()) != mean_.size()) {
    throw ArgumentError("vector length does not match basis dimension");
  }
  const Eigen::Map<const VectorXd> b(values.data(), mean_.size());
  return gram_pinv_ * (q_.transpose() * (b - mean_));
}

VectorXd PcaBasis::reconstruct_vector(const CoeffVector& alpha) const {
  if (alpha.size() != q_.cols()) {
    throw ArgumentError("coefficient count does not match basis");
  }
  return q_ * alpha + mean_;
}

PcaBasis fit_basis(const MatrixXd& samples, int components) {
  const Eigen::Index n_samples = samples.rows();
  const Eigen::Index dim = samples.cols();
  if (components < 1 || components > dim) {
    throw ArgumentError("component count must lie in [1, dimension]");
  }
  if (n_samples < components + 1) {
    throw ArgumentError("need at least M+1 samples to fit M components");
  }
  const VectorXd mean = samples.colwise().mean().transpose();
  const MatrixXd centered = samples.rowwise() - mean.transpose();

  // Eigenvectors of the K x K Gram matrix give those of the N x N
  // covariance: u = X^T v / sqrt(lambda_G).
  const MatrixXd gram = centered * centered.transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram);
  if (es.info() != Eigen::Success) throw NumericError("eigensolver failed");

  const double energy = samples.squaredNorm();
  const double zero_cutoff = 1e-24 * std::max(energy, std::numeric_limits<double>::min());

  MatrixXd q = MatrixXd::Zero(dim, components);
  VectorXd eigenvalues = VectorXd::Zero(components);
  for (int k = 0; k < components; ++k) {
    const Eigen::Index idx = n_samples - 1 - k;
    const double lg = es.eigenvalues()(idx);
    if (!(lg > zero_cutoff)) continue;
    VectorXd u = centered.transpose() * es.eigenvectors().col(idx);
    u /= std::sqrt(lg);
    Eigen::Index arg = 0;
    u.cwiseAbs().maxCoeff(&arg);
    if (u(arg) < 0.0) u = -u;
    const double lambda = lg / static_cast<double>(n_samples - 1);
    eigenvalues(k) = lambda;
    q.col(k) = lambda * u;
  }
  return PcaBasis(mean, std::move(q), std::move(eigenvalues), std::nullopt);
}

PcaBasis fit_basis(std::span<const MappedBrdf> mapped, int components,
                   const ReferenceBrdf& reference) {
  if (mapped.empty()) throw ArgumentError("empty dataset");
  const std::size_t n = reference.bins();
  MatrixXd samples(static_cast<Eigen::Index>(mapped.size()),
                   static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < mapped.size(); ++i) {
    const MappedBrdf& m = mapped[i];
    if (m.channels != 1 || !(m.shape == reference.shape)) {
      throw ArgumentError("basis fitting expects achromatic tables of the reference shape");
    }
    samples.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const VectorXd>(m.values.data(), static_cast<Eigen::Index>(n));
  }
  PcaBasis raw = fit_basis(samples, components);
  return PcaBasis(raw.mean(), raw.q(), raw.eigenvalues(), reference);
}

CoeffVector project(const PcaBasis& basis, const MappedBrdf& m) {
  const int dims = basis.components();
  CoeffVector alpha(static_cast<Eigen::Index>(dims) * m.channels);
  for (int c = 0; c < m.channels; ++c) {
    alpha.segment(static_cast<Eigen::Index>(c) * dims, dims) =
        basis.project(m.channel(c));
  }
  return alpha;
}

MappedBrdf reconstruct(const PcaBasis& basis, const CoeffVector& alpha) {
  if (!basis.reference()) {
    throw ArgumentError("basis has no reference table");
  }
  const int dims = basis.components();
  if (alpha.size() != dims && alpha.size() != 3 * dims) {
    throw ArgumentError("coefficient vector must have M or 3M entries");
  }
  const int channels = static_cast<int>(alpha.size() / dims);
  MappedBrdf m{basis.reference()->shape, channels, {}};
  m.values.resize(static_cast<std::size_t>(channels) * m.bins());
  for (int c = 0; c < channels; ++c) {
    const VectorXd v = basis.reconstruct_vector(
        alpha.segment(static_cast<Eigen::Index>(c) * dims, dims));
    std::copy(v.data(), v.data() + v.size(), m.channel(c).begin());
  }
  return m;
}

void save_basis(const PcaBasis& basis, const std::filesystem::path& path) {
  nlohmann::json header;
  header["format"] = kBasisFormat;
  header["version"] = kBasisVersion;
  header["M"] = basis.components();
  header["N"] = basis.dimension();
  header["basis_hash"] = basis.basis_hash();
  header["eigenvalues"] = std::vector<double>(
      basis.eigenvalues().data(),
      basis.eigenvalues().data() + basis.eigenvalues().size());
  std::size_t ref_count = 0;
  if (const auto& ref = basis.reference()) {
    header["dims"] = {ref->shape.theta_h, ref->shape.theta_d, ref->shape.phi_d};
    header["reference_channels"] = ref->channels;
    header["epsilon"] = ref->epsilon;
    header["cosine_weight_floor"] = ref->cosine_floor;
    ref_count = ref->median.size();
  } else {
    header["dims"] = nullptr;
  }
  header["blocks"] = {
      {{"name", "mu"}, {"count", basis.dimension()}},
      {{"name", "Q"}, {"count", basis.q().size()}, {"layout", "column-major"}},
      {{"name", "reference_median"}, {"count", ref_count}}};

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << header.dump() << '\n';
  internal::write_doubles(out, std::span<const double>(basis.mean().data(),
                                                        basis.mean().size()));
  internal::write_doubles(
      out, std::span<const double>(basis.q().data(), basis.q().size()));
  if (const auto& ref = basis.reference()) {
    internal::write_doubles(out, ref->median);
  }
  if (!out) throw IoError("write failed: " + path.string());
}

PcaBasis load_basis(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError("missing basis header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
    if (header.at("format") != kBasisFormat) {
      throw FormatError("not a basis file");
    }
    if (header.at("version").get<int>() != kBasisVersion) {
      throw FormatError("unsupported basis version");
    }
    const int m = header.at("M").get<int>();
    const Eigen::Index n = header.at("N").get<Eigen::Index>();
    if (m < 1 || n < m) throw FormatError("bad basis dimensions");
    const auto ev = header.at("eigenvalues").get<std::vector<double>>();
    if (static_cast<int>(ev.size()) != m) {
      throw FormatError("eigenvalue count does not match M");
    }
    VectorXd mean(n);
    MatrixXd q(n, m);
    internal::read_doubles(in, std::span<double>(mean.data(), mean.size()));
    internal::read_doubles(in, std::span<double>(q.data(), q.size()));
    std::optional<ReferenceBrdf> ref;
    if (!header.at("dims").is_null()) {
      ReferenceBrdf r;
      const auto dims = header.at("dims").get<std::vector<int>>();
      if (dims.size() != 3) throw FormatError("dims must have three entries");
      r.shape = {dims[0], dims[1], dims[2]};
      r.channels = header.at("reference_channels").get<int>();
      r.epsilon = header.at("epsilon").get<double>();
      r.cosine_floor = header.at("cosine_weight_floor").get<double>();
      r.median.resize(static_cast<std::size_t>(r.channels) * r.bins());
      internal::read_doubles(in, r.median);
      ref = std::move(r);
    }
    PcaBasis basis(std::move(mean), std::move(q),
                   Eigen::Map<const VectorXd>(ev.data(), m), std::move(ref));
    if (basis.basis_hash() != header.at("basis_hash").get<std::string>()) {
      throw FormatError("basis hash does not match file contents");
    }
    return basis;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad basis header: ") + e.what());
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("inconsistent basis file: ") + e.what());
  }
}

double luminance(double r, double g, double b) {
  const auto& m = rgb_to_xyz();
  return m(1, 0) * r + m(1, 1) * g + m(1, 2) * b;
}

Brdf achromatic_of(const Brdf& rgb) {
  if (rgb.channels() != 3) throw ArgumentError("expected an RGB BRDF");
  Brdf y(rgb.shape(), 1);
  for (std::size_t bin = 0; bin < rgb.bins(); ++bin) {
    if (!rgb.valid(0, bin) || !rgb.valid(1, bin) || !rgb.valid(2, bin)) {
      y.set_invalid(0, bin);
      continue;
    }
    y.set_reflectance(0, bin,
                      std::max(0.0, luminance(rgb.reflectance(0, bin),
                                              rgb.reflectance(1, bin),
                                              rgb.reflectance(2, bin))));
  }
  return y;
}

AchromaticSplit split_achromatic(const Brdf& rgb) {
  if (rgb.channels() != 3) throw ArgumentError("expected an RGB BRDF");
  AchromaticSplit out{Brdf(rgb.shape(), 1),
                      ChromaRecord{rgb.shape(), std::vector<double>(rgb.bins()),
                                   std::vector<double>(rgb.bins())}};
  const Eigen::Vector3d& w = white();
  for (std::size_t bin = 0; bin < rgb.bins(); ++bin) {
    if (!rgb.valid(0, bin) || !rgb.valid(1, bin) || !rgb.valid(2, bin)) {
      out.achromatic.set_invalid(0, bin);
      continue;
    }
    const Eigen::Vector3d c(rgb.reflectance(0, bin), rgb.reflectance(1, bin),
                            rgb.reflectance(2, bin));
    const Eigen::Vector3d xyz = rgb_to_xyz() * c;
    const double y = std::max(0.0, xyz.y());
    out.achromatic.set_reflectance(0, bin, y);
    if (!(y > 0.0)) continue;
    const Eigen::Vector3d t = xyz * (std::min(y, w.y()) / y);
    const double fy = lab_f(t.y() / w.y());
    out.chroma.a[bin] = 500.0 * (lab_f(t.x() / w.x()) - fy);
    out.chroma.b[bin] = 200.0 * (fy - lab_f(t.z() / w.z()));
  }
  return out;
}

Brdf merge_achromatic(const Brdf& achromatic, const ChromaRecord& chroma,
                      const ChromaEdit& edit) {
  if (achromatic.channels() != 1) {
    throw ArgumentError("achromatic table must have one channel");
  }
  if (!(achromatic.shape() == chroma.shape) ||
      chroma.a.size() != achromatic.bins() ||
      chroma.b.size() != achromatic.bins()) {
    throw ArgumentError("chroma record does not match the table");
  }
  Brdf out(achromatic.shape(), 3);
  const Eigen::Vector3d& w = white();
  for (std::size_t bin = 0; bin < achromatic.bins(); ++bin) {
    if (!achromatic.valid(0, bin)) {
      for (int c = 0; c < 3; ++c) out.set_invalid(c, bin);
      continue;
    }
    const double y = achromatic.reflectance(0, bin);
    if (!(y > 0.0)) continue;  // black stays black
    const double a = edit.scale * chroma.a[bin] + edit.delta_a;
    const double b = edit.scale * chroma.b[bin] + edit.delta_b;
    const double yc = std::min(y, w.y());
    const double fy = lab_f(yc / w.y());
    Eigen::Vector3d xyz(w.x() * lab_f_inv(fy + a / 500.0), yc,
                        w.z() * lab_f_inv(fy - b / 200.0));
    xyz *= y / yc;
    const Eigen::Vector3d c = xyz_to_rgb() * xyz;
    for (int ch = 0; ch < 3; ++ch) {
      out.set_reflectance(ch, bin, std::max(0.0, c(ch)));
    }
  }
  return out;
}

}  // namespace matspace
