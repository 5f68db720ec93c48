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

namespace dmlab {

template <typename Scalar>
struct QuadratureResult {
  Scalar value{};
  Scalar error_bound{};  // sum of Richardson error estimates over accepted panels
};

namespace detail {

template <typename Scalar, typename F>
void simpson_panel(const F& f, Scalar a, Scalar b, Scalar fa, Scalar fm, Scalar fb, Scalar whole,
                   Scalar tol, int depth, QuadratureResult<Scalar>& acc) {
  const Scalar m = (a + b) / 2;
  const Scalar lm = (a + m) / 2;
  const Scalar rm = (m + b) / 2;
  const Scalar flm = f(lm);
  const Scalar frm = f(rm);
  const Scalar left = (m - a) / 6 * (fa + 4 * flm + fm);
  const Scalar right = (b - m) / 6 * (fm + 4 * frm + fb);
  const Scalar delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15 * tol) {
    acc.value += left + right + delta / 15;
    acc.error_bound += std::abs(delta) / 15;
    return;
  }
  simpson_panel(f, a, m, fa, flm, fm, left, tol / 2, depth - 1, acc);
  simpson_panel(f, m, b, fm, frm, fb, right, tol / 2, depth - 1, acc);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f on [a, b], started from `panels` equal
/// sub-intervals that share the absolute tolerance.
template <typename Scalar, typename F>
QuadratureResult<Scalar> adaptive_simpson(const F& f, Scalar a, Scalar b, Scalar tol,
                                          int panels = 1, int max_depth = 40) {
  QuadratureResult<Scalar> acc;
  const Scalar width = (b - a) / panels;
  for (int k = 0; k < panels; ++k) {
    const Scalar lo = a + width * k;
    const Scalar hi = (k + 1 == panels) ? b : lo + width;
    const Scalar flo = f(lo);
    const Scalar fhi = f(hi);
    const Scalar fmid = f((lo + hi) / 2);
    const Scalar whole = (hi - lo) / 6 * (flo + 4 * fmid + fhi);
    detail::simpson_panel(f, lo, hi, flo, fmid, fhi, whole, tol / panels, max_depth, acc);
  }
  return acc;
}

}  // namespace dmlab
