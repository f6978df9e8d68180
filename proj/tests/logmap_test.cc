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

#include "matspace/logmap.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "matspace/error.h"
#include "test_util.h"

namespace matspace {
namespace {

using testing::kSmallShape;
using testing::random_brdf;

// Cosine weight from first principles at the centre of bin (i, j, .).
double oracle_weight(const TableShape& s, int i, int j) {
  const double u = (i + 0.5) / s.theta_h;
  const double th = u * u * std::numbers::pi / 2;
  const double td = (j + 0.5) / s.theta_d * std::numbers::pi / 2;
  return std::max(std::cos(th) * std::cos(td), 1e-3);
}

TEST(LogMap, WeightsMatchBinCentres) {
  const auto w = cosine_weights(kSmallShape, 1e-3);
  for (int i = 0; i < kSmallShape.theta_h; ++i) {
    for (int j = 0; j < kSmallShape.theta_d; ++j) {
      for (int k = 0; k < kSmallShape.phi_d; ++k) {
        const std::size_t bin = (static_cast<std::size_t>(i) * kSmallShape.theta_d + j) *
                                    kSmallShape.phi_d + k;
        ASSERT_DOUBLE_EQ(w[bin], oracle_weight(kSmallShape, i, j));
      }
    }
  }
}

TEST(LogMap, MedianOracle) {
  std::mt19937_64 rng(1);
  std::vector<Brdf> data;
  for (int i = 0; i < 7; ++i) data.push_back(random_brdf(kSmallShape, rng, 0.2));
  for (int n : {1, 2, 5, 6, 7}) {
    const ReferenceBrdf ref =
        compute_reference(std::span<const Brdf>(data).first(n));
    for (int c = 0; c < 3; ++c) {
      for (std::size_t bin = 0; bin < kSmallShape.bins(); ++bin) {
        std::vector<double> v;
        for (int k = 0; k < n; ++k) {
          if (data[k].valid(c, bin)) v.push_back(data[k].reflectance(c, bin));
        }
        std::sort(v.begin(), v.end());
        double expect = 0.0;
        if (!v.empty()) {
          expect = v.size() % 2 ? v[v.size() / 2]
                                : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
        }
        ASSERT_EQ(ref.at(c, bin), expect);
      }
    }
  }
}

TEST(LogMap, MapMatchesFormula) {
  std::mt19937_64 rng(2);
  std::vector<Brdf> data;
  for (int i = 0; i < 4; ++i) data.push_back(random_brdf(kSmallShape, rng, 0.1));
  const ReferenceBrdf ref = compute_reference(data);
  const MappedBrdf m = map_brdf(data[0], ref);
  for (int c = 0; c < 3; ++c) {
    for (std::size_t bin = 0; bin < kSmallShape.bins(); ++bin) {
      const BinIndex idx = data[0].unflatten(bin);
      const double w = oracle_weight(kSmallShape, idx.theta_h, idx.theta_d);
      const double expect =
          data[0].valid(c, bin)
              ? std::log((data[0].reflectance(c, bin) * w + 1e-3) /
                         (ref.at(c, bin) * w + 1e-3))
              : 0.0;
      ASSERT_NEAR(m.channel(c)[bin], expect, 1e-12);
    }
  }
}

TEST(LogMap, ReferenceMapsToZero) {
  std::mt19937_64 rng(3);
  std::vector<Brdf> data{random_brdf(kSmallShape, rng)};
  const ReferenceBrdf ref = compute_reference(data);
  const MappedBrdf m = map_brdf(data[0], ref);
  for (double v : m.values) ASSERT_EQ(v, 0.0);
}

TEST(LogMap, RoundTripRelativeError) {
  std::mt19937_64 rng(4);
  std::vector<Brdf> data;
  for (int i = 0; i < 10; ++i) data.push_back(random_brdf(kSmallShape, rng, 0.05));
  const ReferenceBrdf ref = compute_reference(data);
  double worst = 0.0;
  for (const Brdf& b : data) {
    const Brdf back = unmap_brdf(map_brdf(b, ref), ref);
    for (int c = 0; c < 3; ++c) {
      for (std::size_t bin = 0; bin < b.bins(); ++bin) {
        if (!b.valid(c, bin)) continue;
        const double x = b.reflectance(c, bin);
        worst = std::max(worst, std::abs(back.reflectance(c, bin) - x) / x);
      }
    }
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(LogMap, ZeroReflectanceRoundTrips) {
  Brdf b(kSmallShape, 3);
  std::vector<Brdf> data{b};
  const ReferenceBrdf ref = compute_reference(data);
  const Brdf back = unmap_brdf(map_brdf(b, ref), ref);
  for (std::size_t bin = 0; bin < b.bins(); ++bin) ASSERT_EQ(back.reflectance(0, bin), 0.0);
}

TEST(LogMap, UnmapClampsAtZero) {
  Brdf b(kSmallShape, 1);
  std::vector<Brdf> data{b};
  const ReferenceBrdf ref = compute_reference(data);
  MappedBrdf m = map_brdf(b, ref);
  std::fill(m.values.begin(), m.values.end(), -50.0);
  const Brdf out = unmap_brdf(m, ref);
  for (std::size_t bin = 0; bin < out.bins(); ++bin) ASSERT_EQ(out.reflectance(0, bin), 0.0);
}

TEST(LogMap, SingleChannelReferenceAppliesToAllChannels) {
  std::mt19937_64 rng(5);
  std::vector<Brdf> gray{random_brdf(kSmallShape, rng, 0.0, 1)};
  const ReferenceBrdf ref = compute_reference(gray);
  const Brdf rgb = random_brdf(kSmallShape, rng);
  const MappedBrdf m = map_brdf(rgb, ref);
  EXPECT_EQ(m.channels, 3);
  const Brdf back = unmap_brdf(m, ref);
  EXPECT_NEAR(back.reflectance(2, 11), rgb.reflectance(2, 11), 1e-9 * rgb.reflectance(2, 11));
}

TEST(LogMap, Errors) {
  EXPECT_THROW(compute_reference(std::span<const Brdf>()), ArgumentError);
  std::vector<Brdf> mixed{Brdf(kSmallShape, 3), Brdf({4, 4, 8}, 3)};
  EXPECT_THROW(compute_reference(mixed), ArgumentError);
  std::vector<Brdf> one{Brdf(kSmallShape, 3)};
  const ReferenceBrdf ref = compute_reference(one);
  EXPECT_THROW(map_brdf(Brdf({4, 4, 8}, 3), ref), ArgumentError);
}

}  // namespace
}  // namespace matspace
