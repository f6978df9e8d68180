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

#ifndef MATSPACE_LOGMAP_H_
#define MATSPACE_LOGMAP_H_

#include <span>
#include <vector>

#include "matspace/merl_io.h"

namespace matspace {

inline constexpr double kDefaultEpsilon = 1e-3;
inline constexpr double kDefaultCosineFloor = 1e-3;

// Reference table and regulariser of the log-relative mapping.
struct ReferenceBrdf {
  TableShape shape;
  int channels = 1;
  std::vector<double> median;  // reflectance, [channel][bin]
  double epsilon = kDefaultEpsilon;
  double cosine_floor = kDefaultCosineFloor;

  std::size_t bins() const { return shape.bins(); }
  double at(int channel, std::size_t bin) const {
    return median[static_cast<std::size_t>(channel) * bins() + bin];
  }
  // Throws ArgumentError when entries are negative/non-finite or the
  // regularisers are not positive.
  void validate() const;
};

// Log-ratio values of a BRDF against a reference, [channel][bin].
struct MappedBrdf {
  TableShape shape;
  int channels = 1;
  std::vector<double> values;

  std::size_t bins() const { return shape.bins(); }
  std::span<const double> channel(int c) const {
    return std::span<const double>(values).subspan(
        static_cast<std::size_t>(c) * bins(), bins());
  }
  std::span<double> channel(int c) {
    return std::span<double>(values).subspan(
        static_cast<std::size_t>(c) * bins(), bins());
  }
};

// w = max(cos(theta_h) * cos(theta_d), floor) at every bin centre.
std::vector<double> cosine_weights(const TableShape& shape, double floor);

// Per-bin median over the dataset; invalid samples are excluded and bins
// with no valid sample get 0. Throws ArgumentError on an empty dataset or
// inconsistent shapes.
ReferenceBrdf compute_reference(std::span<const Brdf> dataset,
                                double epsilon = kDefaultEpsilon,
                                double cosine_floor = kDefaultCosineFloor);

// value = ln((rho*w + eps) / (ref*w + eps)); invalid bins map to 0.
// A single-channel reference is applied to every channel of b.
MappedBrdf map_brdf(const Brdf& b, const ReferenceBrdf& ref);

// rho = ((ref*w + eps) * exp(value) - eps) / w, clamped at 0.
Brdf unmap_brdf(const MappedBrdf& m, const ReferenceBrdf& ref);

}  // namespace matspace

#endif  // MATSPACE_LOGMAP_H_
