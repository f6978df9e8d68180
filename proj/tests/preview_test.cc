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

#include "matspace/preview.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "matspace/error.h"
#include "matspace/synthetic.h"
#include "test_util.h"

namespace matspace {
namespace {

using testing::TempDir;
using testing::uniform;

Brdf constant_brdf(const TableShape& shape, double rho) {
  Brdf b(shape, 3);
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < b.bins(); ++i) b.set_reflectance(c, i, rho);
  return b;
}

EnvironmentMap random_environment(std::mt19937_64& rng, int w, int h) {
  EnvironmentMap env;
  env.width = w;
  env.height = h;
  env.rgb.resize(3 * static_cast<std::size_t>(w) * h);
  for (auto& v : env.rgb) v = uniform(rng, 0.0, 1.0);
  return env;
}

TEST(Preview, ZeroBrdfIsBlackOnBackground) {
  PreviewScene scene;
  scene.resolution = 32;
  const Image img = render_sphere(Brdf(TableShape{8, 8, 16}, 3), scene);
  ASSERT_EQ(img.rgb.size(), 32u * 32u * 3u);
  // Corner is background, centre is black.
  EXPECT_EQ(img.rgb[0], 40);
  const std::size_t centre = 3 * (16 * 32 + 16);
  EXPECT_EQ(img.rgb[centre], 0);
  EXPECT_EQ(img.rgb[centre + 1], 0);
  EXPECT_EQ(img.rgb[centre + 2], 0);
}

TEST(Preview, LambertCentreRadiance) {
  const Brdf lambert = constant_brdf(kMerlShape, 1.0 / std::numbers::pi);
  PreviewScene scene;
  scene.resolution = 33;  // odd, so one pixel sits on the sphere centre
  const RadianceImage r = render_sphere_radiance(lambert, scene);
  const Eigen::Vector3d c = r.at(16, 16);
  for (int ch = 0; ch < 3; ++ch) EXPECT_NEAR(c(ch), 1.0 / std::numbers::pi, 1e-3);
  // Off-centre pixels follow the cosine law: L = cos(theta_n) / pi.
  for (int x : {4, 10, 24, 30}) {
    const double sx = 2.0 * (x + 0.5) / 33 - 1.0;
    const double sy = 1.0 - 2.0 * (16 + 0.5) / 33;
    const double cos_n = std::sqrt(1.0 - sx * sx - sy * sy);
    EXPECT_NEAR(r.at(x, 16)(0), cos_n / std::numbers::pi, 1e-3);
  }
}

TEST(Preview, ToneMapFormula) {
  RadianceImage r;
  r.width = 4;
  r.height = 1;
  r.rgb = {0.0, 0.01, 0.1, 0.2, 0.5, 0.9, 1.0, 2.0, 100.0, 0.3, 0.3, 0.3};
  r.inside = {true, true, true, false};
  PreviewScene scene;
  scene.exposure = 1.5;
  const Image img = tone_map(r, scene);
  for (int i = 0; i < 9; ++i) {
    const double v = std::min(1.0, std::pow(1.5 * r.rgb[i], 1.0 / 2.2));
    EXPECT_EQ(img.rgb[i], static_cast<int>(std::lround(255 * v)));
  }
  EXPECT_EQ(img.rgb[9], 40);
}

TEST(Preview, EnvironmentSolidAnglesCoverSphere) {
  std::mt19937_64 rng(1);
  const EnvironmentMap env = random_environment(rng, 64, 32);
  double total = 0.0;
  for (int y = 0; y < env.height; ++y) total += env.width * env.solid_angle(y);
  EXPECT_NEAR(total, 4 * std::numbers::pi, 1e-12);
}

TEST(Preview, DownsamplePreservesPower) {
  std::mt19937_64 rng(2);
  const EnvironmentMap env = random_environment(rng, 128, 64);
  const EnvironmentMap small = downsample_environment(env);
  EXPECT_EQ(small.width, 32);
  EXPECT_EQ(small.height, 16);
  for (int c = 0; c < 3; ++c) {
    double big = 0.0, little = 0.0;
    for (int y = 0; y < env.height; ++y)
      for (int x = 0; x < env.width; ++x) big += env.texel(x, y)(c) * env.solid_angle(y);
    for (int y = 0; y < small.height; ++y)
      for (int x = 0; x < small.width; ++x)
        little += small.texel(x, y)(c) * small.solid_angle(y);
    EXPECT_NEAR(little, big, 1e-12 * big);
  }
}

TEST(Preview, UniformEnvironmentOnLambert) {
  // A white furnace: L = albedo * E / pi * integral of cos = albedo.
  EnvironmentMap env;
  env.width = 64;
  env.height = 32;
  env.rgb.assign(3 * 64 * 32, 1.0);
  PreviewScene scene;
  scene.lighting = env;
  scene.resolution = 17;
  const RadianceImage r =
      render_sphere_radiance(constant_brdf({8, 8, 16}, 0.5 / std::numbers::pi), scene);
  EXPECT_NEAR(r.at(8, 8)(0), 0.5, 0.01);
}

TEST(Preview, EnvironmentAndCameraRotateTogether) {
  std::mt19937_64 rng(3);
  const auto seeds = synthetic_seeds(TableShape{16, 16, 32}, 1, 4);
  PreviewScene a;
  a.lighting = random_environment(rng, 32, 16);
  a.resolution = 48;
  const Image base = render_sphere(seeds[0], a);
  for (double angle : {0.7, 2.1, -1.3}) {
    PreviewScene b = a;
    b.camera_yaw = angle;
    std::get<EnvironmentMap>(b.lighting).rotation = angle;
    const Image rotated = render_sphere(seeds[0], b);
    int worst = 0;
    for (std::size_t i = 0; i < base.rgb.size(); ++i) {
      worst = std::max(worst, std::abs(int(base.rgb[i]) - int(rotated.rgb[i])));
    }
    EXPECT_LE(worst, 1) << "angle " << angle;
  }
}

TEST(Preview, ScalingNeverDarkens) {
  std::mt19937_64 rng(5);
  const Brdf b = testing::random_brdf(TableShape{8, 8, 16}, rng, 0.05);
  Brdf brighter(b.shape(), 3);
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < b.bins(); ++i) {
      if (b.valid(c, i)) brighter.set_reflectance(c, i, 1.7 * b.reflectance(c, i));
      else brighter.set_invalid(c, i);
    }
  PreviewScene scene;
  scene.lighting = random_environment(rng, 16, 8);
  scene.resolution = 24;
  const RadianceImage lo = render_sphere_radiance(b, scene);
  const RadianceImage hi = render_sphere_radiance(brighter, scene);
  for (std::size_t i = 0; i < lo.rgb.size(); ++i) EXPECT_GE(hi.rgb[i], lo.rgb[i]);
}

TEST(Preview, DeterministicPng) {
  const auto seeds = synthetic_seeds(TableShape{8, 8, 16}, 2, 6);
  PreviewScene scene;
  scene.resolution = 32;
  scene.camera_pitch = 0.4;
  const auto a = encode_png(render_sphere(seeds[1], scene));
  const auto b = encode_png(render_sphere(seeds[1], scene));
  EXPECT_EQ(a, b);
  const Image back = decode_png(a);
  EXPECT_EQ(back, render_sphere(seeds[1], scene));
}

TEST(Preview, LoadsPfm) {
  TempDir dir;
  const int w = 4, h = 2;
  {
    std::ofstream out(dir / "env.pfm", std::ios::binary);
    out << "PF\n" << w << ' ' << h << "\n-1.0\n";
    // PFM rows run bottom to top.
    for (int y = h - 1; y >= 0; --y)
      for (int x = 0; x < w; ++x) {
        const float px[3] = {float(x), float(y), 0.5f};
        out.write(reinterpret_cast<const char*>(px), sizeof(px));
      }
  }
  const EnvironmentMap env = load_environment(dir / "env.pfm");
  ASSERT_EQ(env.width, w);
  ASSERT_EQ(env.height, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      EXPECT_EQ(env.texel(x, y), Eigen::Vector3d(x, y, 0.5));
    }
  EXPECT_THROW(load_environment(dir / "missing.hdr"), IoError);
}

TEST(Preview, SceneValidation) {
  PreviewScene s;
  s.resolution = 8;
  EXPECT_THROW(s.validate(), ArgumentError);
  s.resolution = 64;
  s.exposure = 0.0;
  EXPECT_THROW(s.validate(), ArgumentError);
}

}  // namespace
}  // namespace matspace
