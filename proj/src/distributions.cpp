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

#include "dmlab/distributions.hpp"

#include <cmath>
#include <random>

namespace dmlab {

std::string_view to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::kGaussianIid: return "gaussian-iid";
    case DistributionKind::kRademacherIid: return "rademacher-iid";
    case DistributionKind::kUniformSphere: return "uniform-sphere";
    case DistributionKind::kHeavyScalar: return "heavy-scalar";
    case DistributionKind::kRotInvProduct: return "rotinv-product";
  }
  return "unknown";
}

std::string_view to_string(TailFamily family) {
  switch (family) {
    case TailFamily::kSymmetrizedPareto: return "symmetrized-pareto";
    case TailFamily::kStudentT: return "student-t";
  }
  return "unknown";
}

DistributionKind parse_distribution_kind(std::string_view text) {
  for (auto k : {DistributionKind::kGaussianIid, DistributionKind::kRademacherIid,
                 DistributionKind::kUniformSphere, DistributionKind::kHeavyScalar,
                 DistributionKind::kRotInvProduct}) {
    if (to_string(k) == text) return k;
  }
  throw ConfigError("unknown distribution kind '" + std::string(text) + "'");
}

TailFamily parse_tail_family(std::string_view text) {
  if (text == to_string(TailFamily::kSymmetrizedPareto)) return TailFamily::kSymmetrizedPareto;
  if (text == to_string(TailFamily::kStudentT)) return TailFamily::kStudentT;
  throw ConfigError("unknown tail family '" + std::string(text) + "'");
}

void DistributionSpec::validate() const {
  if (dim < 1) throw ConfigError("distribution dim must be >= 1");
  const bool heavy = kind == DistributionKind::kHeavyScalar || kind == DistributionKind::kRotInvProduct;
  // L4-L2 norm equivalence needs a finite fourth moment.
  if (heavy && !(tail_index > 4.0)) {
    throw ConfigError("heavy tail index must exceed 4 (got " + std::to_string(tail_index) + ")");
  }
}

bool DistributionSpec::rotation_invariant() const {
  switch (kind) {
    case DistributionKind::kGaussianIid:
    case DistributionKind::kUniformSphere:
    case DistributionKind::kRotInvProduct:
      return true;
    case DistributionKind::kRademacherIid:
    case DistributionKind::kHeavyScalar:
      // The orthogonal group of R^1 is {+1, -1} and both laws are symmetric.
      return dim == 1;
  }
  return false;
}

bool DistributionSpec::iid_coordinates() const {
  return kind == DistributionKind::kGaussianIid || kind == DistributionKind::kRademacherIid ||
         kind == DistributionKind::kHeavyScalar;
}

double pareto_scale(double tail_index) { return std::sqrt((tail_index - 2.0) / tail_index); }

Vector sample_gaussian(int n, RngStream& rng) {
  if (n < 1) throw ConfigError("sample_gaussian: n must be >= 1");
  Vector out(n);
  for (int i = 0; i < n; ++i) out[i] = rng.gaussian();
  return out;
}

Vector sample_rademacher(int n, RngStream& rng) {
  if (n < 1) throw ConfigError("sample_rademacher: n must be >= 1");
  Vector out(n);
  std::uint64_t word = 0;
  for (int i = 0; i < n; ++i) {
    if (i % 64 == 0) word = rng.next_u64();
    out[i] = ((word >> (i % 64)) & 1u) ? 1.0 : -1.0;
  }
  return out;
}

Vector sample_sphere(int d, RngStream& rng) {
  if (d < 1) throw ConfigError("sample_sphere: d must be >= 1");
  for (;;) {
    Vector g = sample_gaussian(d, rng);
    const double norm = g.norm();
    if (norm > 0.0 && std::isfinite(norm)) return g / norm;
  }
}

double sample_heavy_scalar(const DistributionSpec& spec, RngStream& rng) {
  if (spec.kind != DistributionKind::kHeavyScalar && spec.kind != DistributionKind::kRotInvProduct) {
    throw ConfigError("sample_heavy_scalar: spec is not a heavy law");
  }
  spec.validate();
  const double a = spec.tail_index;
  switch (spec.tail_family) {
    case TailFamily::kSymmetrizedPareto: {
      const std::uint64_t bits = rng.next_u64();
      const double u = static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
      const double magnitude = pareto_scale(a) * std::pow(u, -1.0 / a);
      return (bits & 1u) ? magnitude : -magnitude;
    }
    case TailFamily::kStudentT: {
      const double g = rng.gaussian();
      std::gamma_distribution<double> chi2(a / 2.0, 2.0);
      const double t = g / std::sqrt(chi2(rng) / a);
      return t * std::sqrt((a - 2.0) / a);
    }
  }
  return 0.0;
}

Vector sample_X(const DistributionSpec& spec, RngStream& rng) {
  if (spec.kind != DistributionKind::kRotInvProduct) {
    throw ConfigError("sample_X: spec must be rotinv-product");
  }
  spec.validate();
  Vector w = sample_sphere(spec.dim, rng);
  const double v = sample_heavy_scalar(spec, rng);
  return (std::sqrt(static_cast<double>(spec.dim)) * v) * w;
}

Vector sample_vector(const DistributionSpec& spec, RngStream& rng) {
  spec.validate();
  switch (spec.kind) {
    case DistributionKind::kGaussianIid: return sample_gaussian(spec.dim, rng);
    case DistributionKind::kRademacherIid: return sample_rademacher(spec.dim, rng);
    case DistributionKind::kUniformSphere: return std::sqrt(static_cast<double>(spec.dim)) * sample_sphere(spec.dim, rng);
    case DistributionKind::kRotInvProduct: return sample_X(spec, rng);
    case DistributionKind::kHeavyScalar: {
      Vector out(spec.dim);
      for (int i = 0; i < spec.dim; ++i) out[i] = sample_heavy_scalar(spec, rng);
      return out;
    }
  }
  return {};
}

}  // namespace dmlab
