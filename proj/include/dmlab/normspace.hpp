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

#include <cmath>
#include <limits>
#include <string>
#include <string_view>

#include "dmlab/quadrature.hpp"
#include "dmlab/rng.hpp"
#include "dmlab/types.hpp"

namespace dmlab {

enum class NormFamily { kLp, kMaxDot };

/// (R^n, ||.||) given by a norm oracle. Immutable after construction.
///
/// kLp: the l_p norm, p in [1, inf].
/// kMaxDot: ||x|| = max_i |<a_i, x>| over the rows a_i of a k x n matrix.
/// The rows must be nonzero and span R^n, otherwise this is only a
/// seminorm.
class NormSpace {
 public:
  static NormSpace lp(int n, double p, std::string label = {});
  static NormSpace max_dot(Matrix rows, std::string label = {});

  int n() const noexcept { return n_; }
  NormFamily family() const noexcept { return family_; }
  double p() const noexcept { return p_; }
  const Matrix& functionals() const noexcept { return rows_; }
  const std::string& label() const noexcept { return label_; }
  bool is_lp(double p) const noexcept { return family_ == NormFamily::kLp && p_ == p; }

  /// Short family tag used in CSV output: "l1", "l2", "linf", "lp3.5", "max-dot".
  std::string family_tag() const;

  template <typename Derived>
  double operator()(const Eigen::MatrixBase<Derived>& x) const {
    if (x.size() != n_) {
      throw ConfigError("norm: dimension mismatch (expected " + std::to_string(n_) + ", got " +
                        std::to_string(x.size()) + ")");
    }
    if (family_ == NormFamily::kMaxDot) return (rows_ * x).cwiseAbs().maxCoeff();
    if (p_ == 1.0) return x.template lpNorm<1>();
    if (p_ == 2.0) return x.norm();
    if (std::isinf(p_)) return x.template lpNorm<Eigen::Infinity>();
    const double scale = x.template lpNorm<Eigen::Infinity>();
    if (scale == 0.0) return 0.0;
    return scale * std::pow((x.cwiseAbs() / scale).array().pow(p_).sum(), 1.0 / p_);
  }

 private:
  NormSpace() = default;

  int n_ = 0;
  NormFamily family_ = NormFamily::kLp;
  double p_ = 2.0;
  Matrix rows_;
  std::string label_;
};

template <typename Derived>
double norm(const NormSpace& space, const Eigen::MatrixBase<Derived>& x) {
  return space(x);
}

/// Norm of every column of an n x k matrix.
Vector column_norms(const NormSpace& space, const Eigen::Ref<const Matrix>& columns);

/// R(K°) = sup over the dual ball of the Euclidean norm.
double dual_radius(const NormSpace& space);

enum class GaussMethod { kAuto, kMonteCarlo, kClosedForm, kQuadrature };

std::string_view to_string(GaussMethod method);

/// Estimate of E||G|| for a standard gaussian G in R^n.
struct GaussNormEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // statistical for monte-carlo, integration bound otherwise
  long samples = 0;
  GaussMethod method = GaussMethod::kMonteCarlo;
};

/// kAuto picks the closed form for l1 and l2, quadrature for l_inf and Monte
/// Carlo otherwise. Monte Carlo sample k uses rng.substream(k).
GaussNormEstimate expected_gauss_norm(const NormSpace& space, long n_samples, const RngStream& rng,
                                      GaussMethod method = GaussMethod::kAuto);

/// E||G||_inf on R^n as the integral of 1 - (2 Phi(t) - 1)^n over [0, inf).
QuadratureResult<double> gauss_linf_quadrature(int n, double tol = 1e-6);

struct CriticalDimension {
  double value = 0.0;
  double std_error = 0.0;
};

/// d*(K) = (E||G|| / R(K°))^2 with first-order error propagation.
CriticalDimension critical_dimension(const NormSpace& space, const GaussNormEstimate& gauss);

/// Truncation level scale * (E||G|| + R(K°) sqrt(log(e m / r))), 1 <= r <= m.
double phi(const NormSpace& space, const GaussNormEstimate& gauss, long r, long m, double scale = 1.0);

}  // namespace dmlab
