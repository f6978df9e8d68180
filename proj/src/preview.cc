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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <Eigen/Geometry>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "matspace/error.h"

namespace matspace {
namespace {

using Eigen::Vector3d;

// Orthonormal tangent frame around n (Duff et al. branchless variant).
void tangent_frame(const Vector3d& n, Vector3d& t, Vector3d& b) {
  const double sign = std::copysign(1.0, n.z());
  const double a = -1.0 / (sign + n.z());
  const double c = n.x() * n.y() * a;
  t = Vector3d(1.0 + sign * n.x() * n.x() * a, sign * c, -sign * n.x());
  b = Vector3d(c, sign + n.y() * n.y() * a, -n.y());
}

Eigen::Matrix3d camera_rotation(const PreviewScene& s) {
  return (Eigen::AngleAxisd(s.camera_yaw, Vector3d::UnitY()) *
          Eigen::AngleAxisd(s.camera_pitch, Vector3d::UnitX()))
      .toRotationMatrix();
}

}  // namespace

Vector3d EnvironmentMap::direction(int x, int y) const {
  const double theta = (y + 0.5) / height * std::numbers::pi;
  const double phi = (x + 0.5) / width * 2.0 * std::numbers::pi + rotation;
  return {std::sin(theta) * std::sin(phi), std::cos(theta),
          std::sin(theta) * std::cos(phi)};
}

double EnvironmentMap::solid_angle(int y) const {
  const double t0 = static_cast<double>(y) / height * std::numbers::pi;
  const double t1 = static_cast<double>(y + 1) / height * std::numbers::pi;
  return 2.0 * std::numbers::pi / width * (std::cos(t0) - std::cos(t1));
}

void PreviewScene::validate() const {
  if (resolution < 16) throw ArgumentError("preview resolution must be >= 16");
  if (!(exposure > 0.0) || !std::isfinite(exposure)) {
    throw ArgumentError("exposure must be positive");
  }
  if (!(gamma > 0.0)) throw ArgumentError("gamma must be positive");
  if (const auto* env = std::get_if<EnvironmentMap>(&lighting)) {
    if (env->width < 1 || env->height < 1 ||
        env->rgb.size() != 3 * static_cast<std::size_t>(env->width) * env->height) {
      throw ArgumentError("environment map has inconsistent size");
    }
  } else {
    const auto& d = std::get<DirectionalLight>(lighting);
    if (!(d.direction.norm() > 0.0)) throw ArgumentError("light direction is zero");
  }
}

EnvironmentMap downsample_environment(const EnvironmentMap& env, int max_w,
                                      int max_h) {
  const int w = std::min(env.width, max_w);
  const int h = std::min(env.height, max_h);
  if (w == env.width && h == env.height) return env;
  EnvironmentMap out;
  out.width = w;
  out.height = h;
  out.rotation = env.rotation;
  std::vector<double> sum(3 * static_cast<std::size_t>(w) * h, 0.0);
  std::vector<double> weight(static_cast<std::size_t>(w) * h, 0.0);
  for (int y = 0; y < env.height; ++y) {
    const int ty = static_cast<int>(static_cast<long>(y) * h / env.height);
    const double dw = env.solid_angle(y);
    for (int x = 0; x < env.width; ++x) {
      const int tx = static_cast<int>(static_cast<long>(x) * w / env.width);
      const std::size_t t = static_cast<std::size_t>(ty) * w + tx;
      const Vector3d v = env.texel(x, y);
      for (int c = 0; c < 3; ++c) sum[3 * t + c] += dw * v(c);
      weight[t] += dw;
    }
  }
  out.rgb.resize(sum.size());
  for (std::size_t t = 0; t < weight.size(); ++t) {
    for (int c = 0; c < 3; ++c) {
      out.rgb[3 * t + c] = weight[t] > 0.0 ? sum[3 * t + c] / weight[t] : 0.0;
    }
  }
  return out;
}

Vector3d shade_lookup(const Brdf& brdf, const HalfDiffCoords& c) {
  const TableShape& s = brdf.shape();
  const int td = theta_diff_index(c.theta_d, s.theta_d);
  const int pd = phi_diff_index(c.phi_d, s.phi_d);
  const double u =
      std::sqrt(std::clamp(c.theta_h, 0.0, std::numbers::pi / 2) /
                (std::numbers::pi / 2)) *
          s.theta_h -
      0.5;
  const int i0 = std::clamp(static_cast<int>(std::floor(u)), 0, s.theta_h - 1);
  const int i1 = std::min(i0 + 1, s.theta_h - 1);
  const double f = std::clamp(u - i0, 0.0, 1.0);
  const std::size_t b0 = brdf.bin(i0, td, pd);
  const std::size_t b1 = brdf.bin(i1, td, pd);
  Vector3d out = Vector3d::Zero();
  for (int ch = 0; ch < 3; ++ch) {
    const int src = brdf.channels() == 1 ? 0 : ch;
    const bool v0 = brdf.valid(src, b0), v1 = brdf.valid(src, b1);
    if (v0 && v1) {
      out(ch) = (1.0 - f) * brdf.reflectance(src, b0) + f * brdf.reflectance(src, b1);
    } else if (v0) {
      out(ch) = brdf.reflectance(src, b0);
    } else if (v1) {
      out(ch) = brdf.reflectance(src, b1);
    }
  }
  return out;
}

RadianceImage render_sphere_radiance(const Brdf& brdf, const PreviewScene& scene) {
  scene.validate();
  const int n = scene.resolution;
  const Eigen::Matrix3d rot = camera_rotation(scene);
  const Vector3d view = rot * Vector3d::UnitZ();

  // Light samples: direction and radiance * solid angle.
  std::vector<std::pair<Vector3d, Vector3d>> lights;
  if (const auto* d = std::get_if<DirectionalLight>(&scene.lighting)) {
    lights.emplace_back(d->direction.normalized(), d->radiance);
  } else {
    const EnvironmentMap env =
        downsample_environment(std::get<EnvironmentMap>(scene.lighting));
    for (int y = 0; y < env.height; ++y) {
      const double dw = env.solid_angle(y);
      for (int x = 0; x < env.width; ++x) {
        const Vector3d le = env.texel(x, y);
        if (le.isZero()) continue;
        lights.emplace_back(env.direction(x, y), le * dw);
      }
    }
  }

  RadianceImage img;
  img.width = img.height = n;
  img.rgb.assign(3 * static_cast<std::size_t>(n) * n, 0.0);
  img.inside.assign(static_cast<std::size_t>(n) * n, false);
  for (int py = 0; py < n; ++py) {
    const double sy = 1.0 - 2.0 * (py + 0.5) / n;
    for (int px = 0; px < n; ++px) {
      const double sx = 2.0 * (px + 0.5) / n - 1.0;
      const double r2 = sx * sx + sy * sy;
      if (r2 >= 1.0) continue;
      const std::size_t pix = static_cast<std::size_t>(py) * n + px;
      img.inside[pix] = true;
      const Vector3d normal = rot * Vector3d(sx, sy, std::sqrt(1.0 - r2));
      Vector3d t, b;
      tangent_frame(normal, t, b);
      const Vector3d wo(t.dot(view), b.dot(view), normal.dot(view));
      if (wo.z() <= 0.0) continue;
      Vector3d radiance = Vector3d::Zero();
      for (const auto& [dir, power] : lights) {
        const double cos_i = normal.dot(dir);
        if (cos_i <= 0.0) continue;
        const Vector3d wi(t.dot(dir), b.dot(dir), cos_i);
        const Vector3d f = shade_lookup(brdf, dirs_to_halfdiff(wi, wo));
        radiance += cos_i * f.cwiseProduct(power);
      }
      for (int c = 0; c < 3; ++c) img.rgb[3 * pix + c] = radiance(c);
    }
  }
  return img;
}

Image tone_map(const RadianceImage& radiance, const PreviewScene& scene) {
  Image out;
  out.width = radiance.width;
  out.height = radiance.height;
  out.rgb.resize(3 * static_cast<std::size_t>(out.width) * out.height);
  for (std::size_t p = 0; p < radiance.inside.size(); ++p) {
    for (int c = 0; c < 3; ++c) {
      if (!radiance.inside[p]) {
        out.rgb[3 * p + c] = scene.background[c];
        continue;
      }
      const double l = std::max(0.0, scene.exposure * radiance.rgb[3 * p + c]);
      const double v = std::clamp(std::pow(l, 1.0 / scene.gamma), 0.0, 1.0);
      out.rgb[3 * p + c] = static_cast<std::uint8_t>(std::lround(255.0 * v));
    }
  }
  return out;
}

Image render_sphere(const Brdf& brdf, const PreviewScene& scene) {
  return tone_map(render_sphere_radiance(brdf, scene), scene);
}

EnvironmentMap load_environment(const std::filesystem::path& path) {
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_ANYDEPTH | cv::IMREAD_COLOR);
  if (m.empty()) throw IoError("cannot read environment map " + path.string());
  m.convertTo(m, CV_64FC3);
  EnvironmentMap env;
  env.width = m.cols;
  env.height = m.rows;
  env.rgb.resize(3 * static_cast<std::size_t>(m.cols) * m.rows);
  for (int y = 0; y < m.rows; ++y) {
    for (int x = 0; x < m.cols; ++x) {
      const auto& bgr = m.at<cv::Vec3d>(y, x);
      const std::size_t i = 3 * (static_cast<std::size_t>(y) * m.cols + x);
      env.rgb[i] = bgr[2];
      env.rgb[i + 1] = bgr[1];
      env.rgb[i + 2] = bgr[0];
    }
  }
  return env;
}

std::vector<std::uint8_t> encode_png(const Image& image) {
  cv::Mat m(image.height, image.width, CV_8UC3);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const std::size_t i = 3 * (static_cast<std::size_t>(y) * image.width + x);
      m.at<cv::Vec3b>(y, x) = cv::Vec3b(image.rgb[i + 2], image.rgb[i + 1], image.rgb[i]);
    }
  }
  std::vector<std::uint8_t> bytes;
  if (!cv::imencode(".png", m, bytes)) throw IoError("PNG encoding failed");
  return bytes;
}

void write_png(const Image& image, const std::filesystem::path& path) {
  const auto bytes = encode_png(image);
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) throw IoError("cannot write " + path.string());
  const std::size_t n = std::fwrite(bytes.data(), 1, bytes.size(), f);
  const bool ok = std::fclose(f) == 0 && n == bytes.size();
  if (!ok) throw IoError("short write to " + path.string());
}

Image decode_png(const std::vector<std::uint8_t>& bytes) {
  const cv::Mat m = cv::imdecode(bytes, cv::IMREAD_COLOR);
  if (m.empty()) throw FormatError("not a decodable image");
  Image out;
  out.width = m.cols;
  out.height = m.rows;
  out.rgb.resize(3 * static_cast<std::size_t>(m.cols) * m.rows);
  for (int y = 0; y < m.rows; ++y) {
    for (int x = 0; x < m.cols; ++x) {
      const auto& bgr = m.at<cv::Vec3b>(y, x);
      const std::size_t i = 3 * (static_cast<std::size_t>(y) * m.cols + x);
      out.rgb[i] = bgr[2];
      out.rgb[i + 1] = bgr[1];
      out.rgb[i + 2] = bgr[0];
    }
  }
  return out;
}

}  // namespace matspace
