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

#ifndef MATSPACE_ERROR_H_
#define MATSPACE_ERROR_H_

#include <stdexcept>
#include <string>

namespace matspace {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or truncated input file.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Precondition on an argument violated (sizes, counts, ranges).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Input outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A statistic was requested for which no data exists.
class MissingDataError : public Error {
 public:
  using Error::Error;
};

// A model and a set of coefficients come from different bases.
class CompatibilityError : public Error {
 public:
  using Error::Error;
};

// Linear algebra failed despite regularisation.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Unknown identifier (material, attribute file, ...).
class NotFoundError : public Error {
 public:
  using Error::Error;
};

// CSV schema problems: bad header or unknown names.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A data row failed validation. Carries the 1-based line number.
class RowError : public Error {
 public:
  RowError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace matspace

#endif  // MATSPACE_ERROR_H_
