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
#include <string>

#include "matspace/error.h"

namespace matspace {
namespace {

int reference_channel(const ReferenceBrdf& ref, int c) {
  return ref.channels == 1 ? 0 : c;
}

void check_compatible(const TableShape& shape, int channels,
                      const ReferenceBrdf& ref) {
  if (!(shape == ref.shape)) {
    throw ArgumentError("table shape differs from the reference");
  }
  if (ref.channels != 1 && ref.channels != channels) {
    throw ArgumentError("channel count differs from the reference");
  }
}

}  // namespace

void ReferenceBrdf::validate() const {
  if (!(epsilon > 0.0) || !(cosine_floor > 0.0)) {
    throw ArgumentError("epsilon and cosine floor must be positive");
  }
  if (median.size() != static_cast<std::size_t>(channels) * bins()) {
    throw ArgumentError("reference size does not match its shape");
  }
  for (double m : median) {
    if (!std::isfinite(m) || m < 0.0) {
      throw ArgumentError("reference entries must be finite and >= 0");
    }
  }
}

std::vector<double> cosine_weights(const TableShape& shape, double floor) {
  std::vector<double> w(shape.bins());
  std::size_t k = 0;
  for (int th = 0; th < shape.theta_h; ++th) {
    for (int td = 0; td < shape.theta_d; ++td) {
      const HalfDiffCoords c = bin_center(shape, {th, td, 0});
      const double v =
          std::max(std::cos(c.theta_h) * std::cos(c.theta_d), floor);
      std::fill_n(w.begin() + static_cast<std::ptrdiff_t>(k), shape.phi_d, v);
      k += static_cast<std::size_t>(shape.phi_d);
    }
  }
  return w;
}

ReferenceBrdf compute_reference(std::span<const Brdf> dataset, double epsilon,
                                double cosine_floor) {
  if (dataset.empty()) throw ArgumentError("empty dataset");
  const TableShape shape = dataset.front().shape();
  const int channels = dataset.front().channels();
  for (const Brdf& b : dataset) {
    if (!(b.shape() == shape) || b.channels() != channels) {
      throw ArgumentError("inconsistent table shapes in dataset");
    }
  }
  ReferenceBrdf ref;
  ref.shape = shape;
  ref.channels = channels;
  ref.epsilon = epsilon;
  ref.cosine_floor = cosine_floor;
  ref.median.resize(static_cast<std::size_t>(channels) * shape.bins());

  std::vector<double> column;
  column.reserve(dataset.size());
  for (int c = 0; c < channels; ++c) {
    for (std::size_t bin = 0; bin < shape.bins(); ++bin) {
      column.clear();
      for (const Brdf& b : dataset) {
        if (b.valid(c, bin)) column.push_back(b.reflectance(c, bin));
      }
      double m = 0.0;
      if (!column.empty()) {
        const std::size_t half = column.size() / 2;
        std::nth_element(column.begin(), column.begin() + half, column.end());
        m = column[half];
        if (column.size() % 2 == 0) {
          const double lower =
              *std::max_element(column.begin(), column.begin() + half);
          m = 0.5 * (lower + m);
        }
      }
      ref.median[static_cast<std::size_t>(c) * shape.bins() + bin] = m;
    }
  }
  ref.validate();
  return ref;
}

MappedBrdf map_brdf(const Brdf& b, const ReferenceBrdf& ref) {
  check_compatible(b.shape(), b.channels(), ref);
  const std::vector<double> w = cosine_weights(b.shape(), ref.cosine_floor);
  const double eps = ref.epsilon;
  MappedBrdf m{b.shape(), b.channels(),
               std::vector<double>(static_cast<std::size_t>(b.channels()) *
                                   b.bins())};
  for (int c = 0; c < b.channels(); ++c) {
    const int rc = reference_channel(ref, c);
    std::span<double> out = m.channel(c);
    for (std::size_t bin = 0; bin < b.bins(); ++bin) {
      if (!b.valid(c, bin)) {
        out[bin] = 0.0;
        continue;
      }
      const double rho = b.reflectance(c, bin);
      out[bin] = std::log(rho * w[bin] + eps) -
                 std::log(ref.at(rc, bin) * w[bin] + eps);
    }
  }
  return m;
}

Brdf unmap_brdf(const MappedBrdf& m, const ReferenceBrdf& ref) {
  check_compatible(m.shape, m.channels, ref);
  const std::vector<double> w = cosine_weights(m.shape, ref.cosine_floor);
  const double eps = ref.epsilon;
  Brdf out(m.shape, m.channels);
  for (int c = 0; c < m.channels; ++c) {
    const int rc = reference_channel(ref, c);
    std::span<const double> in = m.channel(c);
    for (std::size_t bin = 0; bin < m.bins(); ++bin) {
      const double base = ref.at(rc, bin) * w[bin];
      // base + (base + eps) * (e^v - 1) == (base + eps) * e^v - eps, but
      // without cancellation when v is near zero.
      const double num = base + (base + eps) * std::expm1(in[bin]);
      double rho = num / w[bin];
      if (!(rho > 0.0)) rho = 0.0;
      if (!std::isfinite(rho)) {
        throw NumericError("mapped value overflows reflectance");
      }
      out.set_reflectance(c, bin, rho);
    }
  }
  return out;
}

}  // namespace matspace
