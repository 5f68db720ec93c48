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

/// Nondecreasing rearrangement x^#: a sorted copy of x.
template <typename Derived>
VectorX<typename Derived::Scalar> rearrange_nondecreasing(const Eigen::MatrixBase<Derived>& x) {
  VectorX<typename Derived::Scalar> out = x;
  std::stable_sort(out.data(), out.data() + out.size());
  return out;
}

/// Distance between two already sorted vectors, (sum |a_i - b_i|^2)^(1/2).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar sorted_distance(const Eigen::MatrixBase<DerivedA>& a,
                                          const Eigen::MatrixBase<DerivedB>& b) {
  return (a - b).norm();
}

/// min over permutations pi of (sum |x_i - y_pi(i)|^2)^(1/2). In one
/// dimension the optimal coupling matches order statistics, so this is the
/// Euclidean distance of the two nondecreasing rearrangements.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar w2(const Eigen::MatrixBase<DerivedA>& x, const Eigen::MatrixBase<DerivedB>& y) {
  if (x.size() != y.size()) throw ConfigError("w2: length mismatch");
  return sorted_distance(rearrange_nondecreasing(x), rearrange_nondecreasing(y));
}

/// Indices of the s largest |v_i|, ties broken toward the lower index.
/// Returned in selection order (largest first).
template <typename Derived>
std::vector<Eigen::Index> top_magnitude_indices(const Eigen::MatrixBase<Derived>& v, Eigen::Index s) {
  if (s < 0 || s > v.size()) throw ConfigError("top_magnitude_indices: s out of range");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index(0));
  auto before = [&](Eigen::Index i, Eigen::Index j) {
    const auto ai = std::abs(v[i]);
    const auto aj = std::abs(v[j]);
    return ai > aj || (ai == aj && i < j);
  };
  std::partial_sort(idx.begin(), idx.begin() + s, idx.end(), before);
  idx.resize(static_cast<std::size_t>(s));
  return idx;
}

/// Euclidean norm of the s largest-magnitude coordinates of v.
template <typename Derived>
typename Derived::Scalar top_s_mass(const Eigen::MatrixBase<Derived>& v, Eigen::Index s) {
  if (s < 1 || s > v.size()) throw ConfigError("top_s_mass: need 1 <= s <= length");
  VectorX<typename Derived::Scalar> sq = v.cwiseAbs2();
  std::nth_element(sq.data(), sq.data() + (s - 1), sq.data() + sq.size(), std::greater<>());
  // After nth_element the first s entries are the s largest, in no order.
  std::sort(sq.data(), sq.data() + s, std::greater<>());
  typename Derived::Scalar acc(0);
  for (Eigen::Index i = s - 1; i >= 0; --i) acc += sq[i];
  return std::sqrt(acc);
}

/// The (k+1)-th largest |v_i| (k counted from zero).
template <typename Derived>
typename Derived::Scalar kth_largest_magnitude(const Eigen::MatrixBase<Derived>& v, Eigen::Index k) {
  if (k < 0 || k >= v.size()) throw ConfigError("kth_largest_magnitude: index out of range");
  VectorX<typename Derived::Scalar> mag = v.cwiseAbs();
  std::nth_element(mag.data(), mag.data() + k, mag.data() + mag.size(), std::greater<>());
  return mag[k];
}

}  // namespace dmlab
