// Copyright 2026 The dmlab Authors
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

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dmlab {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using RowMatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;
using RowMatrix = RowMatrixX<double>;

/// Raised for malformed inputs: bad dimensions, out-of-range parameters,
/// unreadable configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class NumericalFailure {
  kIncompleteNet,
  kDegenerateLambda,
  kNonFinite,
};

inline const char* to_string(NumericalFailure f) {
  switch (f) {
    case NumericalFailure::kIncompleteNet: return "incomplete-net";
    case NumericalFailure::kDegenerateLambda: return "degenerate-lambda";
    case NumericalFailure::kNonFinite: return "non-finite";
  }
  return "unknown";
}

/// Raised when a computation produced an unusable result.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(NumericalFailure failure, const std::string& what)
      : std::runtime_error(std::string(to_string(failure)) + ": " + what), failure_(failure) {}

  NumericalFailure failure() const noexcept { return failure_; }

 private:
  NumericalFailure failure_;
};

}  // namespace dmlab
