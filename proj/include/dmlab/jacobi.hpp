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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dmlab/types.hpp"

namespace dmlab {

template <typename Scalar>
struct JacobiResult {
  VectorX<Scalar> eigenvalues;   // ascending
  MatrixX<Scalar> eigenvectors;  // column k pairs with eigenvalues[k]
  Scalar off_norm{};             // Frobenius norm of the final off-diagonal part
  int sweeps = 0;
};

template <typename Scalar>
Scalar off_diagonal_norm(const MatrixX<Scalar>& a) {
  Scalar acc(0);
  for (Eigen::Index q = 1; q < a.cols(); ++q)
    for (Eigen::Index p = 0; p < q; ++p) acc += a(p, q) * a(p, q);
  return std::sqrt(2 * acc);
}

/// Cyclic Jacobi eigensolver for a small dense symmetric matrix. Sweeps
/// rotate away every off-diagonal pair (p, q) in row order until the
/// off-diagonal Frobenius norm is at most `tol`.
template <typename Derived>
JacobiResult<typename Derived::Scalar> jacobi_eigen(const Eigen::MatrixBase<Derived>& sym,
                                                    typename Derived::Scalar tol = 1e-12,
                                                    int max_sweeps = 100) {
  using Scalar = typename Derived::Scalar;
  if (sym.rows() != sym.cols()) throw ConfigError("jacobi_eigen: matrix must be square");
  if (!sym.allFinite()) throw NumericalError(NumericalFailure::kNonFinite, "jacobi_eigen: non-finite entries");
  const Eigen::Index n = sym.rows();
  MatrixX<Scalar> a = (sym + sym.transpose()) / Scalar(2);
  MatrixX<Scalar> v = MatrixX<Scalar>::Identity(n, n);

  int sweep = 0;
  Scalar off = off_diagonal_norm(a);
  while (off > tol && sweep < max_sweeps) {
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        if (apq == Scalar(0)) continue;
        const Scalar theta = (a(q, q) - a(p, p)) / (2 * apq);
        const Scalar t = (theta >= 0 ? Scalar(1) : Scalar(-1)) /
                         (std::abs(theta) + std::sqrt(theta * theta + Scalar(1)));
        const Scalar c = Scalar(1) / std::sqrt(t * t + Scalar(1));
        const Scalar s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar akp = a(k, p);
          const Scalar akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar apk = a(p, k);
          const Scalar aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = Scalar(0);
        a(q, p) = Scalar(0);
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar vkp = v(k, p);
          const Scalar vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    ++sweep;
    off = off_diagonal_norm(a);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
  JacobiResult<Scalar> out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    out.eigenvectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  out.off_norm = off;
  out.sweeps = sweep;
  return out;
}

}  // namespace dmlab
