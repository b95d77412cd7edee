// SPDX-License-Identifier: Apache-2.0
//
// cbsel: UE-assisted adaptive codebook selection laboratory
// Copyright (C) 2026 The cbsel authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CBSEL_ERRORS_HPP
#define CBSEL_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cbsel {

// Invalid configuration or usage. CLI exit code 1.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Index or extent outside the valid range. CLI exit code 1.
class RangeError : public std::out_of_range {
  public:
    using std::out_of_range::out_of_range;
};

// Operand dimensions do not agree. CLI exit code 1.
class ShapeError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Numerical failure (singular system, non-finite values). CLI exit code 3.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Input that admits no well-defined result, e.g. an all-zero channel matrix.
class DegenerateInputError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

// Malformed input file. CLI exit code 2. Line is 1-based, 0 when unknown.
class FormatError : public std::runtime_error {
  public:
    FormatError(const std::string &what, std::size_t line = 0)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

// File written by an incompatible format version. CLI exit code 2.
class VersionError : public FormatError {
  public:
    using FormatError::FormatError;
};

} // namespace cbsel

#endif
