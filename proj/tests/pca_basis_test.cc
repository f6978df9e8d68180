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

#include <cmath>
#include <fstream>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "matspace/error.h"
#include "test_util.h"

namespace matspace {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using testing::kSmallShape;
using testing::TempDir;
using testing::uniform;

// K samples in N dims with a clear spectral gap after the fifth component.
MatrixXd toy_dataset(int k, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixXd basis(n, 8);
  for (auto& v : basis.reshaped()) v = g(rng);
  basis = Eigen::HouseholderQR<MatrixXd>(basis).householderQ() * MatrixXd::Identity(n, 8);
  const double scales[8] = {10, 7, 5, 3, 2, 0.1, 0.05, 0.01};
  MatrixXd x(k, n);
  for (int i = 0; i < k; ++i) {
    VectorXd v = VectorXd::Constant(n, 0.3);
    for (int c = 0; c < 8; ++c) v += scales[c] * g(rng) * basis.col(c);
    x.row(i) = v.transpose();
  }
  return x;
}

// sin of the largest principal angle between two column spaces.
double subspace_sine(const MatrixXd& a, const MatrixXd& b) {
  const MatrixXd qa = Eigen::HouseholderQR<MatrixXd>(a).householderQ() *
                      MatrixXd::Identity(a.rows(), a.cols());
  const MatrixXd qb = Eigen::HouseholderQR<MatrixXd>(b).householderQ() *
                      MatrixXd::Identity(b.rows(), b.cols());
  const MatrixXd resid = qb - qa * (qa.transpose() * qb);
  return Eigen::JacobiSVD<MatrixXd>(resid).singularValues()(0);
}

TEST(PcaBasis, MatchesDenseCovarianceEigensolve) {
  std::mt19937_64 rng(1);
  const MatrixXd x = toy_dataset(30, 200, rng);
  const PcaBasis basis = fit_basis(x, 5);

  const MatrixXd centered = x.rowwise() - x.colwise().mean();
  const MatrixXd cov = centered.transpose() * centered / 29.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(cov);
  for (int k = 0; k < 5; ++k) {
    const double expect = es.eigenvalues()(199 - k);
    EXPECT_NEAR(basis.eigenvalues()(k), expect, 1e-8 * expect);
  }
  const MatrixXd top = es.eigenvectors().rightCols(5);
  EXPECT_LE(std::asin(std::min(1.0, subspace_sine(top, basis.directions()))), 1e-6);
  // Q columns are directions scaled by eigenvalues.
  for (int k = 0; k < 5; ++k) {
    EXPECT_NEAR(basis.q().col(k).norm(), basis.eigenvalues()(k), 1e-10 * basis.eigenvalues()(k));
  }
  EXPECT_NEAR(basis.mean()(3), x.col(3).mean(), 1e-14);
}

TEST(PcaBasis, ProjectReconstructIdentityOnSpan) {
  std::mt19937_64 rng(2);
  const MatrixXd x = toy_dataset(30, 200, rng);
  const PcaBasis basis = fit_basis(x, 5);
  for (int t = 0; t < 20; ++t) {
    VectorXd alpha(5);
    for (auto& v : alpha) v = uniform(rng, -3, 3);
    const VectorXd b = basis.reconstruct_vector(alpha);
    const VectorXd back = basis.project(b);
    EXPECT_LE((back - alpha).norm(), 1e-8 * std::max(1.0, alpha.norm()));
  }
}

TEST(PcaBasis, ProjectionIsLeastSquares) {
  std::mt19937_64 rng(3);
  const MatrixXd x = toy_dataset(30, 200, rng);
  const PcaBasis basis = fit_basis(x, 5);
  const VectorXd b = x.row(4).transpose();
  const VectorXd alpha = basis.project(b);
  const VectorXd oracle =
      basis.q().colPivHouseholderQr().solve(VectorXd(b - basis.mean()));
  EXPECT_LE((alpha - oracle).norm(), 1e-9 * oracle.norm());
}

TEST(PcaBasis, RankDeficientDataGivesZeroComponents) {
  // Three samples in a 2D affine subspace: at most 2 non-zero components.
  MatrixXd x(4, 6);
  x << 1, 2, 3, 4, 5, 6,
       2, 3, 4, 5, 6, 7,
       3, 4, 5, 6, 7, 8,
       1, 1, 1, 1, 1, 2;
  const PcaBasis basis = fit_basis(x, 3);
  EXPECT_GT(basis.eigenvalues()(0), 0.0);
  EXPECT_EQ(basis.eigenvalues()(2), 0.0);
  EXPECT_EQ(basis.q().col(2).norm(), 0.0);
  // Projection still reconstructs data inside the span.
  const VectorXd b = x.row(1).transpose();
  EXPECT_LE((basis.reconstruct_vector(basis.project(b)) - b).norm(), 1e-10);
}

TEST(PcaBasis, FitErrors) {
  EXPECT_THROW(fit_basis(MatrixXd::Ones(5, 4), 5), ArgumentError);
  EXPECT_THROW(fit_basis(MatrixXd::Ones(3, 10), 5), ArgumentError);
}

std::vector<MappedBrdf> mapped_set(std::mt19937_64& rng, ReferenceBrdf& ref, int n) {
  std::vector<Brdf> ys;
  for (int i = 0; i < n; ++i) ys.push_back(testing::random_brdf(kSmallShape, rng, 0.02, 1));
  ref = compute_reference(ys);
  std::vector<MappedBrdf> out;
  for (const auto& y : ys) out.push_back(map_brdf(y, ref));
  return out;
}

TEST(PcaBasis, SaveLoadRoundTrip) {
  std::mt19937_64 rng(4);
  ReferenceBrdf ref;
  const auto mapped = mapped_set(rng, ref, 12);
  const PcaBasis basis = fit_basis(mapped, 5, ref);
  TempDir dir;
  save_basis(basis, dir / "basis.bin");
  const PcaBasis back = load_basis(dir / "basis.bin");
  EXPECT_EQ(back.basis_hash(), basis.basis_hash());
  EXPECT_EQ(back.q(), basis.q());
  EXPECT_EQ(back.mean(), basis.mean());
  EXPECT_EQ(back.reference()->median, basis.reference()->median);
  EXPECT_EQ(project(back, mapped[3]), project(basis, mapped[3]));
}

TEST(PcaBasis, CorruptedFileRejected) {
  std::mt19937_64 rng(5);
  ReferenceBrdf ref;
  const auto mapped = mapped_set(rng, ref, 8);
  const PcaBasis basis = fit_basis(mapped, 5, ref);
  TempDir dir;
  save_basis(basis, dir / "basis.bin");
  {
    std::fstream f(dir / "basis.bin", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-3, std::ios::end);
    f.put('\x7f');
  }
  EXPECT_THROW(load_basis(dir / "basis.bin"), FormatError);
  std::filesystem::resize_file(dir / "basis.bin", 100);
  EXPECT_THROW(load_basis(dir / "basis.bin"), FormatError);
}

TEST(PcaBasis, HashDependsOnContents) {
  std::mt19937_64 rng(6);
  ReferenceBrdf ref;
  const auto mapped = mapped_set(rng, ref, 8);
  const PcaBasis a = fit_basis(mapped, 5, ref);
  const PcaBasis b = fit_basis(mapped, 4, ref);
  EXPECT_NE(a.basis_hash(), b.basis_hash());
  EXPECT_EQ(a.basis_hash(), fit_basis(mapped, 5, ref).basis_hash());
  EXPECT_EQ(a.basis_hash().size(), 64u);
}

TEST(PcaBasis, ColourProjectionIsBlockwise) {
  std::mt19937_64 rng(7);
  ReferenceBrdf ref;
  const auto mapped = mapped_set(rng, ref, 10);
  const PcaBasis basis = fit_basis(mapped, 5, ref);
  MappedBrdf rgb{kSmallShape, 3, {}};
  for (int c = 0; c < 3; ++c) {
    rgb.values.insert(rgb.values.end(), mapped[c].values.begin(), mapped[c].values.end());
  }
  const CoeffVector alpha = project(basis, rgb);
  ASSERT_EQ(alpha.size(), 15);
  for (int c = 0; c < 3; ++c) {
    EXPECT_EQ(alpha.segment(5 * c, 5), project(basis, mapped[c]));
  }
  const MappedBrdf back = reconstruct(basis, alpha);
  EXPECT_EQ(back.channels, 3);
}

TEST(Chroma, LuminanceOfWhiteIsOne) {
  EXPECT_NEAR(luminance(1, 1, 1), 1.0, 1e-6);
  EXPECT_NEAR(luminance(1, 0, 0), 0.2126729, 1e-7);
}

TEST(Chroma, SplitMergeRoundTrip) {
  std::mt19937_64 rng(8);
  const Brdf b = testing::random_brdf(kSmallShape, rng, 0.05);
  const AchromaticSplit s = split_achromatic(b);
  const Brdf back = merge_achromatic(s.achromatic, s.chroma);
  for (std::size_t bin = 0; bin < b.bins(); ++bin) {
    const bool valid = b.valid(0, bin) && b.valid(1, bin) && b.valid(2, bin);
    ASSERT_EQ(back.valid(0, bin), valid);
    if (!valid) continue;
    for (int c = 0; c < 3; ++c) {
      const double x = b.reflectance(c, bin);
      ASSERT_NEAR(back.reflectance(c, bin), x, 1e-9 * std::max(1.0, x));
    }
  }
}

TEST(Chroma, GrayHasZeroChroma) {
  Brdf b(kSmallShape, 3);
  for (std::size_t bin = 0; bin < b.bins(); ++bin) {
    for (int c = 0; c < 3; ++c) b.set_reflectance(c, bin, 0.3 + 0.01 * (bin % 7));
  }
  const AchromaticSplit s = split_achromatic(b);
  for (std::size_t bin = 0; bin < b.bins(); ++bin) {
    ASSERT_NEAR(s.chroma.a[bin], 0.0, 1e-9);
    ASSERT_NEAR(s.chroma.b[bin], 0.0, 1e-9);
  }
}

TEST(Chroma, EditShiftsChromaOnly) {
  std::mt19937_64 rng(9);
  const Brdf b = testing::random_brdf(kSmallShape, rng);
  const AchromaticSplit s = split_achromatic(b);
  const Brdf edited = merge_achromatic(s.achromatic, s.chroma, {5.0, -3.0, 1.2});
  const AchromaticSplit s2 = split_achromatic(edited);
  int checked = 0;
  for (std::size_t bin = 0; bin < b.bins(); ++bin) {
    // Only bins whose edited colour stays inside the RGB gamut keep luminance.
    bool clipped = false;
    for (int c = 0; c < 3; ++c) clipped |= edited.reflectance(c, bin) == 0.0;
    if (clipped || s.achromatic.reflectance(0, bin) > 1.0) continue;
    ++checked;
    ASSERT_NEAR(s2.achromatic.reflectance(0, bin), s.achromatic.reflectance(0, bin),
                1e-9);
    ASSERT_NEAR(s2.chroma.a[bin], 1.2 * s.chroma.a[bin] + 5.0, 1e-6);
    ASSERT_NEAR(s2.chroma.b[bin], 1.2 * s.chroma.b[bin] - 3.0, 1e-6);
  }
  EXPECT_GT(checked, 0);
}

TEST(Chroma, BlackStaysBlack) {
  Brdf y(kSmallShape, 1);
  ChromaRecord c{kSmallShape, std::vector<double>(y.bins(), 20.0),
                 std::vector<double>(y.bins(), -10.0)};
  const Brdf out = merge_achromatic(y, c);
  for (std::size_t bin = 0; bin < y.bins(); ++bin) {
    for (int ch = 0; ch < 3; ++ch) ASSERT_EQ(out.reflectance(ch, bin), 0.0);
  }
}

}  // namespace
}  // namespace matspace
