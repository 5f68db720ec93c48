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

#include <string>
#include <string_view>

#include "dmlab/rng.hpp"
#include "dmlab/types.hpp"

namespace dmlab {

enum class DistributionKind {
  kGaussianIid,
  kRademacherIid,
  kUniformSphere,
  kHeavyScalar,
  kRotInvProduct,
};

enum class TailFamily {
  kSymmetrizedPareto,
  kStudentT,
};

std::string_view to_string(DistributionKind kind);
std::string_view to_string(TailFamily family);
DistributionKind parse_distribution_kind(std::string_view text);
TailFamily parse_tail_family(std::string_view text);

/// Law of a scalar or a random vector.
///
/// For kHeavyScalar the tail fields describe the scalar itself. For
/// kRotInvProduct they describe the radial factor v of X = sqrt(dim) W v.
/// Heavy laws are normalized to unit variance and are symmetric.
struct DistributionSpec {
  DistributionKind kind = DistributionKind::kGaussianIid;
  TailFamily tail_family = TailFamily::kSymmetrizedPareto;
  double tail_index = 7.5;
  int dim = 1;

  static DistributionSpec gaussian(int dim) { return {DistributionKind::kGaussianIid, {}, 7.5, dim}; }
  static DistributionSpec rademacher(int dim) { return {DistributionKind::kRademacherIid, {}, 7.5, dim}; }
  static DistributionSpec sphere(int dim) { return {DistributionKind::kUniformSphere, {}, 7.5, dim}; }
  static DistributionSpec heavy(TailFamily family = TailFamily::kSymmetrizedPareto, double index = 7.5) {
    return {DistributionKind::kHeavyScalar, family, index, 1};
  }
  static DistributionSpec rotinv(int dim, TailFamily family = TailFamily::kSymmetrizedPareto,
                                 double index = 7.5) {
    return {DistributionKind::kRotInvProduct, family, index, dim};
  }

  /// Throws ConfigError on dim < 1 or a heavy tail index <= 4.
  void validate() const;

  /// True when the law of <X, u> does not depend on the unit vector u.
  bool rotation_invariant() const;

  /// True when the coordinates are iid and symmetric (usable for D).
  bool iid_coordinates() const;

  bool operator==(const DistributionSpec&) const = default;
};

/// Lower cutoff x0 of the symmetrized Pareto law with E v^2 = 1:
/// |v| has density proportional to x^-(a+1) on [x0, inf), so
/// E v^2 = x0^2 a / (a - 2).
double pareto_scale(double tail_index);

Vector sample_gaussian(int n, RngStream& rng);
Vector sample_rademacher(int n, RngStream& rng);
Vector sample_sphere(int d, RngStream& rng);
double sample_heavy_scalar(const DistributionSpec& spec, RngStream& rng);

/// X = sqrt(d) W v with W uniform on the sphere and v an independent heavy
/// scalar; spec.kind must be kRotInvProduct.
Vector sample_X(const DistributionSpec& spec, RngStream& rng);

/// Draw one isotropic vector of length spec.dim from any vector law.
/// kHeavyScalar yields iid heavy coordinates; kUniformSphere yields
/// sqrt(d) times a uniform unit vector.
Vector sample_vector(const DistributionSpec& spec, RngStream& rng);

}  // namespace dmlab
