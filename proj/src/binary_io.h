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

#ifndef MATSPACE_SRC_BINARY_IO_H_
#define MATSPACE_SRC_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "matspace/error.h"

namespace matspace::internal {

// Little-endian float64 blocks, independent of host byte order.
inline void write_doubles(std::ostream& out, std::span<const double> values) {
  std::vector<char> buf(values.size() * 8);
  char* p = buf.data();
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) *p++ = static_cast<char>((bits >> (8 * i)) & 0xff);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

inline void read_doubles(std::istream& in, std::span<double> values) {
  std::vector<char> buf(values.size() * 8);
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
    throw FormatError("truncated binary block");
  }
  const char* p = buf.data();
  for (double& v : values) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
      bits |= std::uint64_t(static_cast<unsigned char>(*p++)) << (8 * i);
    }
    v = std::bit_cast<double>(bits);
  }
}

}  // namespace matspace::internal

#endif  // MATSPACE_SRC_BINARY_IO_H_
