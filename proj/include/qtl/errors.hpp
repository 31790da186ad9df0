// Copyright 2026 qtlearn contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qtl {

/// Bad configuration (invalid run settings, unusable option combinations).
/// Maps to process exit code 1.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Malformed input file. Carries the 1-based line number where parsing failed.
/// Maps to process exit code 2.
struct ParseError : std::runtime_error {
    ParseError(const std::string &msg, std::size_t line_number)
        : std::runtime_error(msg + " (line " + std::to_string(line_number) + ")"),
          line(line_number) {}
    std::size_t line;
};

/// Structurally valid input that violates a semantic contract (label out of
/// range, dimension mismatch between artifacts). Maps to process exit code 2.
struct DataError : std::runtime_error {
    explicit DataError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Numerical failure (training divergence, non-finite loss).
/// Maps to process exit code 3.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Model whose output distribution is constant in its parameters; the Fisher
/// information is identically zero and cannot be normalized.
struct DegenerateModelError : NumericError {
    explicit DegenerateModelError(const std::string &msg) : NumericError(msg) {}
};

} // namespace qtl
