// Copyright 2026 The qnnlab Authors
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
/**
 * @file
 * Exception types shared by every qnnlab module.
 *
 * Argument problems use the standard `std::invalid_argument` /
 * `std::out_of_range`; the types below carry extra structure for the
 * synthesis and data paths.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace qnnlab {

/// A polynomial pair failed one of the three layer conditions.
///
/// `condition()` is 1 (degree bound), 2 (parity), 3 (unit modulus on the
/// circle) or 0 when the coefficient field is wrong (complex coefficients
/// handed to a real-coefficient routine).
class ValidationError : public std::invalid_argument {
  public:
    ValidationError(int condition, const std::string &what)
        : std::invalid_argument("condition " + std::to_string(condition) +
                                ": " + what),
          condition_(condition) {}

    [[nodiscard]] int condition() const noexcept { return condition_; }

  private:
    int condition_;
};

/// Floating-point breakdown inside an otherwise valid computation
/// (failed leading-coefficient cancellation, root-finder failure).
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// |P(x)| > 1 somewhere, so no complementary polynomial exists.
class ConstraintViolation : public std::domain_error {
  public:
    ConstraintViolation(double witness_x, double modulus)
        : std::domain_error("|P(x)| = " + std::to_string(modulus) +
                            " > 1 at x = " + std::to_string(witness_x)),
          witness_(witness_x), modulus_(modulus) {}

    [[nodiscard]] double witness() const noexcept { return witness_; }
    [[nodiscard]] double modulus() const noexcept { return modulus_; }

  private:
    double witness_;
    double modulus_;
};

/// Target function leaves [-1, 1] so it cannot be an expectation value.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Malformed or non-finite input data (CSV rows, sampled callbacks).
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace qnnlab
