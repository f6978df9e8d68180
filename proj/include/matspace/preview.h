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

#ifndef MATSPACE_PREVIEW_H_
#define MATSPACE_PREVIEW_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "matspace/merl_io.h"

namespace matspace {

// World frame: +y up; the unrotated camera looks down -z.
struct DirectionalLight {
  Eigen::Vector3d direction{0.0, 0.0, 1.0};  // towards the light
  Eigen::Vector3d radiance{1.0, 1.0, 1.0};   // irradiance at normal incidence
};

// Lat-long radiance map; row 0 is the +y pole, column u wraps around y.
struct EnvironmentMap {
  int width = 0;
  int height = 0;
  std::vector<double> rgb;  // row-major, 3 per texel
  double rotation = 0.0;    // radians about +y

  Eigen::Vector3d texel(int x, int y) const {
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
  }
  // Unit direction of a texel centre, including the rotation.
  Eigen::Vector3d direction(int x, int y) const;
  double solid_angle(int y) const;
};

struct PreviewScene {
  std::variant<DirectionalLight, EnvironmentMap> lighting = DirectionalLight{};
  double camera_yaw = 0.0;    // about +y
  double camera_pitch = 0.0;  // about the camera x axis
  int resolution = 256;
  double exposure = 1.0;
  double gamma = 2.2;
  std::array<std::uint8_t, 3> background{40, 40, 40};

  // Throws ArgumentError unless resolution >= 16 and exposure > 0.
  void validate() const;
};

struct RadianceImage {
  int width = 0;
  int height = 0;
  std::vector<double> rgb;   // linear radiance, 3 per pixel
  std::vector<bool> inside;  // pixel centre lies on the sphere

  Eigen::Vector3d at(int x, int y) const {
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
  }
};

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // 3 per pixel
  bool operator==(const Image&) const = default;
};

// Box-filters (solid-angle weighted) down to at most max_w x max_h.
EnvironmentMap downsample_environment(const EnvironmentMap& env, int max_w = 32,
                                      int max_h = 16);

// Reflectance for all channels with linear interpolation across theta_h
// bins; invalid bins contribute zero.
Eigen::Vector3d shade_lookup(const Brdf& brdf, const HalfDiffCoords& c);

// Orthographic sphere filling the frame; environment lighting is summed
// over the downsampled texels.
RadianceImage render_sphere_radiance(const Brdf& brdf, const PreviewScene& scene);
// clamp((exposure * L)^(1/gamma)) per channel; background outside.
Image tone_map(const RadianceImage& radiance, const PreviewScene& scene);
Image render_sphere(const Brdf& brdf, const PreviewScene& scene);

// Radiance HDR or PFM through OpenCV.
EnvironmentMap load_environment(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_png(const Image& image);
void write_png(const Image& image, const std::filesystem::path& path);
Image decode_png(const std::vector<std::uint8_t>& bytes);

}  // namespace matspace

#endif  // MATSPACE_PREVIEW_H_
