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

#ifndef MATSPACE_MERL_IO_H_
#define MATSPACE_MERL_IO_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace matspace {

// Angular resolution of a tabulated isotropic BRDF.
struct TableShape {
  int theta_h = 90;
  int theta_d = 90;
  int phi_d = 180;

  std::size_t bins() const {
    return static_cast<std::size_t>(theta_h) * theta_d * phi_d;
  }
  bool operator==(const TableShape&) const = default;
};

// Resolution of the public MERL database.
inline constexpr TableShape kMerlShape{90, 90, 180};

// Per-channel factors turning stored MERL values into reflectance (1/sr).
inline constexpr std::array<double, 3> kMerlScale = {
    1.0 / 1500.0, 1.15 / 1500.0, 1.66 / 1500.0};

// Rusinkiewicz half/difference angles. phi_d is reported in [0, 2*pi);
// the table only stores [0, pi) because of reciprocity.
struct HalfDiffCoords {
  double theta_h = 0.0;
  double theta_d = 0.0;
  double phi_d = 0.0;
};

struct BinIndex {
  int theta_h = 0;
  int theta_d = 0;
  int phi_d = 0;
  bool operator==(const BinIndex&) const = default;
};

// Dense tabulated reflectance, [channel][theta_h][theta_d][phi_d].
//
// Samples are kept in file units; reflectance() applies the channel scale.
// A negative stored value marks a bin that was never measured. Such bins
// are reported through valid()/lookup(), never as negative reflectance.
class Brdf {
 public:
  // Zero-filled MERL-sized RGB table.
  Brdf() : Brdf(kMerlShape, 3) {}
  // Zero-filled table. channels must be 1 (achromatic) or 3 (RGB).
  Brdf(TableShape shape, int channels);

  // Adopts samples already in file units. Throws FormatError on a size
  // mismatch or non-finite values.
  static Brdf from_stored(TableShape shape, int channels,
                          std::vector<double> stored);

  const TableShape& shape() const { return shape_; }
  int channels() const { return channels_; }
  std::size_t bins() const { return shape_.bins(); }

  std::size_t bin(int theta_h, int theta_d, int phi_d) const {
    return (static_cast<std::size_t>(theta_h) * shape_.theta_d + theta_d) *
               shape_.phi_d +
           phi_d;
  }
  std::size_t bin(const BinIndex& idx) const {
    return bin(idx.theta_h, idx.theta_d, idx.phi_d);
  }
  BinIndex unflatten(std::size_t bin) const;

  // Multiplier from file units to reflectance for channel c.
  double scale(int channel) const;

  bool valid(int channel, std::size_t bin) const {
    return stored_[slot(channel, bin)] >= 0.0;
  }
  // Reflectance in 1/sr. Throws DomainError on an invalid bin.
  double reflectance(int channel, std::size_t bin) const;
  // Sets a non-negative, finite reflectance.
  void set_reflectance(int channel, std::size_t bin, double rho);
  // Marks the bin as unmeasured (stored sentinel -1).
  void set_invalid(int channel, std::size_t bin);

  std::span<const double> stored() const { return stored_; }

  bool operator==(const Brdf& other) const;

 private:
  std::size_t slot(int channel, std::size_t bin) const {
    return static_cast<std::size_t>(channel) * bins() + bin;
  }

  TableShape shape_;
  int channels_;
  std::vector<double> stored_;
};

// Table indices for a coordinate. theta_h uses the square-root mapping
// floor(sqrt(theta_h / (pi/2)) * n); phi_d is reduced modulo pi.
int theta_half_index(double theta_h, int n);
int theta_diff_index(double theta_d, int n);
int phi_diff_index(double phi_d, int n);
BinIndex bin_index(const TableShape& shape, const HalfDiffCoords& c);

// Angles at the centre of a bin (inverse of the index mapping).
HalfDiffCoords bin_center(const TableShape& shape, const BinIndex& idx);

// Nearest-bin reflectance; std::nullopt for an invalid bin.
std::optional<double> lookup(const Brdf& brdf, const HalfDiffCoords& c,
                             int channel);

// Converts incident/outgoing unit vectors in the local surface frame
// (z = normal) into half/difference angles. Throws DomainError if either
// direction is below the horizon.
HalfDiffCoords dirs_to_halfdiff(const Eigen::Vector3d& wi,
                                const Eigen::Vector3d& wo);

// MERL binary container: three little-endian int32 dims, then
// 3 * dims float64 samples in channel-major order.
Brdf read_merl(const std::filesystem::path& path);
void write_merl(const Brdf& brdf, const std::filesystem::path& path);

// In-memory variants used by the file functions.
Brdf decode_merl(std::span<const std::byte> bytes);
std::vector<std::byte> encode_merl(const Brdf& brdf);

}  // namespace matspace

#endif  // MATSPACE_MERL_IO_H_
