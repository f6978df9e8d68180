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

#include "matspace/merl_io.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "matspace/error.h"

namespace matspace {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr std::size_t kHeaderBytes = 3 * sizeof(std::int32_t);

void check_channels(int channels) {
  if (channels != 1 && channels != 3) {
    throw ArgumentError("a BRDF has 1 or 3 channels, got " +
                        std::to_string(channels));
  }
}

void check_shape(const TableShape& s) {
  if (s.theta_h <= 0 || s.theta_d <= 0 || s.phi_d <= 0) {
    throw ArgumentError("table dimensions must be positive");
  }
}

int clamp_index(double x, int n) {
  if (!(x > 0.0)) return 0;
  const int i = static_cast<int>(x);
  return std::min(i, n - 1);
}

// Rodrigues rotation of v about a unit axis.
Eigen::Vector3d rotate(const Eigen::Vector3d& v, const Eigen::Vector3d& axis,
                       double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return v * c + axis * axis.dot(v) * (1.0 - c) + axis.cross(v) * s;
}

void put_u32(std::byte* out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out[i] = std::byte((v >> (8 * i)) & 0xffu);
}

void put_u64(std::byte* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out[i] = std::byte((v >> (8 * i)) & 0xffu);
}

std::uint32_t get_u32(const std::byte* in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(in[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(const std::byte* in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(in[i]) << (8 * i);
  return v;
}

}  // namespace

Brdf::Brdf(TableShape shape, int channels)
    : shape_(shape), channels_(channels) {
  check_shape(shape);
  check_channels(channels);
  stored_.assign(static_cast<std::size_t>(channels) * shape.bins(), 0.0);
}

Brdf Brdf::from_stored(TableShape shape, int channels,
                       std::vector<double> stored) {
  check_shape(shape);
  check_channels(channels);
  if (stored.size() != static_cast<std::size_t>(channels) * shape.bins()) {
    throw FormatError("sample count does not match table dimensions");
  }
  for (double v : stored) {
    if (!std::isfinite(v)) throw FormatError("non-finite sample in table");
  }
  Brdf b(TableShape{1, 1, 1}, channels);
  b.shape_ = shape;
  b.stored_ = std::move(stored);
  return b;
}

BinIndex Brdf::unflatten(std::size_t bin) const {
  BinIndex idx;
  idx.phi_d = static_cast<int>(bin % shape_.phi_d);
  bin /= shape_.phi_d;
  idx.theta_d = static_cast<int>(bin % shape_.theta_d);
  idx.theta_h = static_cast<int>(bin / shape_.theta_d);
  return idx;
}

double Brdf::scale(int channel) const {
  return channels_ == 3 ? kMerlScale[channel] : 1.0;
}

double Brdf::reflectance(int channel, std::size_t bin) const {
  const double s = stored_[slot(channel, bin)];
  if (s < 0.0) throw DomainError("invalid sample");
  return s * scale(channel);
}

void Brdf::set_reflectance(int channel, std::size_t bin, double rho) {
  if (!std::isfinite(rho) || rho < 0.0) {
    throw ArgumentError("reflectance must be finite and non-negative");
  }
  stored_[slot(channel, bin)] = rho / scale(channel);
}

void Brdf::set_invalid(int channel, std::size_t bin) {
  stored_[slot(channel, bin)] = -1.0;
}

bool Brdf::operator==(const Brdf& other) const {
  return shape_ == other.shape_ && channels_ == other.channels_ &&
         stored_ == other.stored_;
}

int theta_half_index(double theta_h, int n) {
  if (theta_h <= 0.0) return 0;
  return clamp_index(std::sqrt(theta_h / kHalfPi) * n, n);
}

int theta_diff_index(double theta_d, int n) {
  return clamp_index(theta_d / kHalfPi * n, n);
}

int phi_diff_index(double phi_d, int n) {
  double p = std::fmod(phi_d, std::numbers::pi);
  if (p < 0.0) p += std::numbers::pi;
  return clamp_index(p / std::numbers::pi * n, n);
}

BinIndex bin_index(const TableShape& shape, const HalfDiffCoords& c) {
  return {theta_half_index(c.theta_h, shape.theta_h),
          theta_diff_index(c.theta_d, shape.theta_d),
          phi_diff_index(c.phi_d, shape.phi_d)};
}

HalfDiffCoords bin_center(const TableShape& shape, const BinIndex& idx) {
  const double u = (idx.theta_h + 0.5) / shape.theta_h;
  return {u * u * kHalfPi, (idx.theta_d + 0.5) / shape.theta_d * kHalfPi,
          (idx.phi_d + 0.5) / shape.phi_d * std::numbers::pi};
}

std::optional<double> lookup(const Brdf& brdf, const HalfDiffCoords& c,
                             int channel) {
  const std::size_t b = brdf.bin(bin_index(brdf.shape(), c));
  if (!brdf.valid(channel, b)) return std::nullopt;
  return brdf.reflectance(channel, b);
}

HalfDiffCoords dirs_to_halfdiff(const Eigen::Vector3d& wi,
                                const Eigen::Vector3d& wo) {
  constexpr double kHorizonSlack = 1e-12;
  if (wi.z() < -kHorizonSlack || wo.z() < -kHorizonSlack) {
    throw DomainError("direction below the horizon");
  }
  Eigen::Vector3d half = wi + wo;
  const double norm = half.norm();
  half = norm > 1e-300 ? Eigen::Vector3d(half / norm) : Eigen::Vector3d::UnitZ();

  HalfDiffCoords out;
  out.theta_h = std::acos(std::clamp(half.z(), -1.0, 1.0));
  const double phi_h = std::atan2(half.y(), half.x());

  const Eigen::Vector3d tmp = rotate(wi, Eigen::Vector3d::UnitZ(), -phi_h);
  const Eigen::Vector3d diff =
      rotate(tmp, Eigen::Vector3d::UnitY(), -out.theta_h);
  out.theta_d = std::acos(std::clamp(diff.z(), -1.0, 1.0));
  double phi_d = std::atan2(diff.y(), diff.x());
  if (phi_d < 0.0) phi_d += 2.0 * std::numbers::pi;
  if (phi_d >= 2.0 * std::numbers::pi) phi_d = 0.0;
  out.phi_d = phi_d;
  return out;
}

std::vector<std::byte> encode_merl(const Brdf& brdf) {
  if (brdf.channels() != 3) {
    throw ArgumentError("MERL files hold exactly three channels");
  }
  const std::span<const double> samples = brdf.stored();
  std::vector<std::byte> out(kHeaderBytes + samples.size() * sizeof(double));
  const TableShape& s = brdf.shape();
  put_u32(out.data() + 0, static_cast<std::uint32_t>(s.theta_h));
  put_u32(out.data() + 4, static_cast<std::uint32_t>(s.theta_d));
  put_u32(out.data() + 8, static_cast<std::uint32_t>(s.phi_d));
  std::byte* p = out.data() + kHeaderBytes;
  for (double v : samples) {
    put_u64(p, std::bit_cast<std::uint64_t>(v));
    p += sizeof(double);
  }
  return out;
}

Brdf decode_merl(std::span<const std::byte> bytes) {
  if (bytes.size() < kHeaderBytes) throw FormatError("truncated MERL header");
  std::array<std::int64_t, 3> dims{};
  for (int i = 0; i < 3; ++i) {
    dims[i] = static_cast<std::int32_t>(get_u32(bytes.data() + 4 * i));
    if (dims[i] <= 0 || dims[i] > 1 << 16) {
      throw FormatError("malformed MERL header: bad dimension " +
                        std::to_string(dims[i]));
    }
  }
  const std::uint64_t count =
      static_cast<std::uint64_t>(dims[0] * dims[1] * dims[2]) * 3;
  const std::uint64_t expected = kHeaderBytes + count * sizeof(double);
  if (bytes.size() < expected) throw FormatError("truncated MERL payload");
  if (bytes.size() > expected) {
    throw FormatError("MERL payload longer than header dimensions");
  }
  std::vector<double> stored(count);
  const std::byte* p = bytes.data() + kHeaderBytes;
  for (auto& v : stored) {
    v = std::bit_cast<double>(get_u64(p));
    p += sizeof(double);
  }
  const TableShape shape{static_cast<int>(dims[0]), static_cast<int>(dims[1]),
                         static_cast<int>(dims[2])};
  return Brdf::from_stored(shape, 3, std::move(stored));
}

Brdf read_merl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open " + path.string());
  const std::streamsize size = in.tellg();
  if (size < 0) throw IoError("cannot size " + path.string());
  std::vector<std::byte> raw(static_cast<std::size_t>(size));
  in.seekg(0);
  if (!in.read(reinterpret_cast<char*>(raw.data()), size)) {
    throw IoError("read failed: " + path.string());
  }
  return decode_merl(raw);
}

void write_merl(const Brdf& brdf, const std::filesystem::path& path) {
  const std::vector<std::byte> bytes = encode_merl(brdf);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace matspace
