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

#ifndef MATSPACE_PCA_BASIS_H_
#define MATSPACE_PCA_BASIS_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Core>

#include "matspace/logmap.h"
#include "matspace/merl_io.h"

namespace matspace {

// Number of principal components used throughout.
inline constexpr int kComponents = 5;

// Coefficients: M entries (achromatic) or 3*M laid out as R, G, B blocks.
using CoeffVector = Eigen::VectorXd;

// Affine PCA model b = Q * alpha + mu.
//
// Q holds unit principal directions scaled by their covariance eigenvalue,
// so it is orthogonal but not orthonormal; projection uses the
// pseudo-inverse.
class PcaBasis {
 public:
  PcaBasis() = default;
  PcaBasis(Eigen::VectorXd mean, Eigen::MatrixXd q, Eigen::VectorXd eigenvalues,
           std::optional<ReferenceBrdf> reference);

  int components() const { return static_cast<int>(q_.cols()); }
  Eigen::Index dimension() const { return mean_.size(); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& q() const { return q_; }
  // Covariance eigenvalues of the retained components, non-increasing.
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  // Unit-norm principal directions (Q with the scaling removed).
  Eigen::MatrixXd directions() const;
  const std::optional<ReferenceBrdf>& reference() const { return reference_; }
  const std::string& basis_hash() const { return hash_; }

  // alpha = pinv(Q) (b - mu) for one channel vector.
  CoeffVector project(std::span<const double> values) const;
  CoeffVector project(const Eigen::VectorXd& values) const {
    return project(std::span<const double>(values.data(),
                                           static_cast<std::size_t>(values.size())));
  }
  // b = Q alpha + mu for one block of M coefficients.
  Eigen::VectorXd reconstruct_vector(const CoeffVector& alpha) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd q_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd gram_pinv_;
  std::optional<ReferenceBrdf> reference_;
  std::string hash_;
};

// Fits the top-M components of a row-per-sample data matrix. Throws
// ArgumentError for fewer than M+1 rows or M larger than the dimension.
PcaBasis fit_basis(const Eigen::MatrixXd& samples, int components);

// Fits a basis on achromatic mapped BRDFs and attaches their reference.
PcaBasis fit_basis(std::span<const MappedBrdf> mapped, int components,
                   const ReferenceBrdf& reference);

// Projects every channel; returns M or 3*M coefficients.
CoeffVector project(const PcaBasis& basis, const MappedBrdf& m);

// Inverse of project(); alpha of size M or 3*M selects the channel count.
// Requires a basis with a reference (for the table shape).
MappedBrdf reconstruct(const PcaBasis& basis, const CoeffVector& alpha);

// Basis file: one JSON header line, then little-endian float64 blocks for
// mu, Q (column-major) and the reference median.
void save_basis(const PcaBasis& basis, const std::filesystem::path& path);
PcaBasis load_basis(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Achromatic / chroma decomposition.

// CIELab (a, b) of every bin, computed on the colour rescaled to
// luminance min(Y, 1).
struct ChromaRecord {
  TableShape shape;
  std::vector<double> a;
  std::vector<double> b;
};

struct ChromaEdit {
  double delta_a = 0.0;
  double delta_b = 0.0;
  double scale = 1.0;
};

struct AchromaticSplit {
  Brdf achromatic;  // single channel, linear luminance Y
  ChromaRecord chroma;
};

// Linear sRGB (D65) luminance of one RGB triple.
double luminance(double r, double g, double b);

// Splits an RGB BRDF into luminance and Lab chroma. A bin invalid in any
// channel is invalid in the achromatic output and has zero chroma.
AchromaticSplit split_achromatic(const Brdf& rgb);

// Reassembles RGB from a luminance table and (edited) chroma:
// (a, b) <- scale * (a, b) + (delta_a, delta_b). Negative RGB is clamped.
Brdf merge_achromatic(const Brdf& achromatic, const ChromaRecord& chroma,
                      const ChromaEdit& edit = {});

// Luminance table of an RGB BRDF (the achromatic half of the split).
Brdf achromatic_of(const Brdf& rgb);

}  // namespace matspace

#endif  // MATSPACE_PCA_BASIS_H_
