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

#ifndef MATSPACE_TESTS_TEST_UTIL_H_
#define MATSPACE_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "matspace/merl_io.h"

namespace matspace::testing {

// Small table used wherever full MERL resolution is not the point.
inline constexpr TableShape kSmallShape{8, 8, 16};

inline double uniform(std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Random RGB table; roughly `invalid_fraction` of bins are unmeasured.
inline Brdf random_brdf(const TableShape& shape, std::mt19937_64& rng,
                        double invalid_fraction = 0.0, int channels = 3) {
  Brdf b(shape, channels);
  for (int c = 0; c < channels; ++c) {
    for (std::size_t i = 0; i < b.bins(); ++i) {
      if (uniform(rng) < invalid_fraction) {
        b.set_invalid(c, i);
      } else {
        b.set_reflectance(c, i, std::exp(uniform(rng, -6.0, 4.0)));
      }
    }
  }
  return b;
}

// Fresh empty directory under the system temp dir.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("matspace-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace matspace::testing

#endif  // MATSPACE_TESTS_TEST_UTIL_H_
