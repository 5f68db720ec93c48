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

#include "dmlab/normspace.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "dmlab/distributions.hpp"
#include "dmlab/parallel.hpp"

namespace dmlab {

NormSpace NormSpace::lp(int n, double p, std::string label) {
  if (n < 1) throw ConfigError("lp space: n must be >= 1");
  if (!(p >= 1.0)) throw ConfigError("lp space: p must be >= 1 or inf");
  NormSpace s;
  s.n_ = n;
  s.family_ = NormFamily::kLp;
  s.p_ = p;
  s.label_ = std::move(label);
  return s;
}

NormSpace NormSpace::max_dot(Matrix rows, std::string label) {
  if (rows.rows() < 1 || rows.cols() < 1) throw ConfigError("max-dot space: empty functional matrix");
  if (!rows.allFinite()) throw ConfigError("max-dot space: non-finite functional entries");
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    if (rows.row(i).squaredNorm() == 0.0) {
      throw ConfigError("max-dot space: functional " + std::to_string(i) + " is zero");
    }
  }
  Eigen::FullPivLU<Matrix> lu(rows);
  if (lu.rank() != rows.cols()) {
    throw ConfigError("max-dot space: functionals do not span R^n (rank " + std::to_string(lu.rank()) +
                      " < " + std::to_string(rows.cols()) + ")");
  }
  NormSpace s;
  s.n_ = static_cast<int>(rows.cols());
  s.family_ = NormFamily::kMaxDot;
  s.p_ = std::numeric_limits<double>::quiet_NaN();
  s.rows_ = std::move(rows);
  s.label_ = std::move(label);
  return s;
}

std::string NormSpace::family_tag() const {
  if (family_ == NormFamily::kMaxDot) return "max-dot";
  if (std::isinf(p_)) return "linf";
  std::ostringstream os;
  os << "l" << p_;
  return os.str();
}

Vector column_norms(const NormSpace& space, const Eigen::Ref<const Matrix>& columns) {
  Vector out(columns.cols());
  for (Eigen::Index k = 0; k < columns.cols(); ++k) out[k] = space(columns.col(k));
  return out;
}

double dual_radius(const NormSpace& space) {
  if (space.family() == NormFamily::kMaxDot) {
    return space.functionals().rowwise().norm().maxCoeff();
  }
  const double p = space.p();
  if (p >= 2.0) return 1.0;
  // Dual exponent q >= 2: sup of ||t||_2 over B_q^n is n^(1/2 - 1/q) = n^(1/p - 1/2).
  return std::pow(static_cast<double>(space.n()), 1.0 / p - 0.5);
}

std::string_view to_string(GaussMethod method) {
  switch (method) {
    case GaussMethod::kAuto: return "auto";
    case GaussMethod::kMonteCarlo: return "monte-carlo";
    case GaussMethod::kClosedForm: return "closed-form";
    case GaussMethod::kQuadrature: return "quadrature";
  }
  return "unknown";
}

QuadratureResult<double> gauss_linf_quadrature(int n, double tol) {
  const double dn = static_cast<double>(n);
  auto survival = [dn](double t) {
    // 1 - (1 - erfc(t / sqrt2))^n, evaluated without cancellation.
    return -std::expm1(dn * std::log1p(-std::erfc(t / std::numbers::sqrt2)));
  };
  double upper = 1.0;
  while (dn * std::erfc(upper / std::numbers::sqrt2) > 1e-16) upper += 0.5;
  const int panels = static_cast<int>(std::ceil(upper / 0.25));
  auto result = adaptive_simpson(survival, 0.0, upper, tol, panels);
  // The integrand is below n erfc(t / sqrt2), whose tail integral past
  // upper >= 1 is below its value at upper.
  result.error_bound += dn * std::erfc(upper / std::numbers::sqrt2);
  return result;
}

namespace {

GaussNormEstimate gauss_norm_monte_carlo(const NormSpace& space, long n_samples, const RngStream& rng) {
  if (n_samples < 2) throw ConfigError("expected_gauss_norm: monte-carlo needs n_samples >= 2");
  std::vector<double> values(static_cast<std::size_t>(n_samples));
  parallel_for(n_samples, [&](std::ptrdiff_t k) {
    RngStream sub = rng.substream(static_cast<std::uint64_t>(k));
    values[static_cast<std::size_t>(k)] = space(sample_gaussian(space.n(), sub));
  });
  const MeanStderr ms = mean_and_stderr(values);
  return {ms.mean, ms.std_error, n_samples, GaussMethod::kMonteCarlo};
}

}  // namespace

GaussNormEstimate expected_gauss_norm(const NormSpace& space, long n_samples, const RngStream& rng,
                                      GaussMethod method) {
  const bool lp = space.family() == NormFamily::kLp;
  if (method == GaussMethod::kAuto) {
    if (lp && (space.p() == 1.0 || space.p() == 2.0)) {
      method = GaussMethod::kClosedForm;
    } else if (lp && std::isinf(space.p())) {
      method = GaussMethod::kQuadrature;
    } else {
      method = GaussMethod::kMonteCarlo;
    }
  }
  const double n = static_cast<double>(space.n());
  switch (method) {
    case GaussMethod::kClosedForm:
      if (space.is_lp(1.0)) return {n * std::sqrt(2.0 / std::numbers::pi), 0.0, 0, method};
      if (space.is_lp(2.0)) {
        const double mean = std::numbers::sqrt2 * std::exp(std::lgamma((n + 1.0) / 2.0) - std::lgamma(n / 2.0));
        return {mean, 0.0, 0, method};
      }
      throw ConfigError("expected_gauss_norm: closed form only for l1 and l2");
    case GaussMethod::kQuadrature: {
      if (!(lp && std::isinf(space.p()))) throw ConfigError("expected_gauss_norm: quadrature only for l_inf");
      const auto q = gauss_linf_quadrature(space.n());
      return {q.value, q.error_bound, 0, method};
    }
    case GaussMethod::kMonteCarlo:
    case GaussMethod::kAuto:
      break;
  }
  return gauss_norm_monte_carlo(space, n_samples, rng);
}

CriticalDimension critical_dimension(const NormSpace& space, const GaussNormEstimate& gauss) {
  if (!(gauss.mean > 0.0)) throw ConfigError("critical_dimension: E||G|| estimate must be positive");
  const double radius = dual_radius(space);
  const double ratio = gauss.mean / radius;
  return {ratio * ratio, 2.0 * ratio * gauss.std_error / radius};
}

double phi(const NormSpace& space, const GaussNormEstimate& gauss, long r, long m, double scale) {
  if (m < 1 || r < 1 || r > m) {
    throw ConfigError("phi: need 1 <= r <= m (r=" + std::to_string(r) + ", m=" + std::to_string(m) + ")");
  }
  const double log_term = 1.0 + std::log(static_cast<double>(m) / static_cast<double>(r));
  return scale * (gauss.mean + dual_radius(space) * std::sqrt(log_term));
}

}  // namespace dmlab
