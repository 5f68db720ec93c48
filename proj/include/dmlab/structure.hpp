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

#include <cstdint>
#include <vector>

#include "dmlab/distributions.hpp"
#include "dmlab/ensemble.hpp"
#include "dmlab/normspace.hpp"
#include "dmlab/rearrangement.hpp"
#include "dmlab/rng.hpp"
#include "dmlab/types.hpp"

namespace dmlab {

// --- quantile profile ------------------------------------------------------

enum class ProfileMethod { kExact, kMonteCarlo };

/// Block averages lambda_i = m * integral over ((i-1)/m, i/m] of the right
/// inverse distribution function of <X, u>. Nondecreasing. For rotation
/// invariant laws the profile does not depend on u.
struct QuantileProfile {
  Vector values;
  long samples = 0;  // Monte Carlo sample count N (0 for exact profiles)
  DistributionSpec law;
  ProfileMethod method = ProfileMethod::kMonteCarlo;

  int m() const { return static_cast<int>(values.size()); }
};

/// max(10^6, 100 m).
long default_profile_samples(int m);

/// Profile of <X, e_1> for a rotation invariant law. Laws whose marginal is
/// the symmetric two-point law get the exact profile. Otherwise N/2 draws
/// are taken and mirrored (every law here is symmetric), the N values are
/// sorted, and the empirical quantile function is integrated blockwise.
/// Requires n_samples >= 100 m.
QuantileProfile quantile_profile(const DistributionSpec& xspec, int m, long n_samples, const RngStream& rng);

/// Integrates the empirical right-quantile function of `sorted` over the m
/// blocks ((i-1)/m, i/m].
Vector block_quantile_means(const Eigen::Ref<const Vector>& sorted, int m);

/// (1/m sum_i |<X_i,u>^# - lambda_i|^2)^(1/2) for every column u of
/// `directions` (d x k).
Vector rearrangement_deviations(const GammaRealization& g, const Eigen::Ref<const Matrix>& directions,
                                const QuantileProfile& profile);

/// Largest entry of rearrangement_deviations; a lower estimate of the sup
/// over the sphere.
double rearrangement_deviation(const GammaRealization& g, const Eigen::Ref<const Matrix>& directions,
                               const QuantileProfile& profile);

// --- large coordinates -----------------------------------------------------

struct AscentOptions {
  int steps = 50;
  int restarts = 5;
};

struct HsmEstimate {
  double value = 0.0;
  Vector direction;  // maximizing direction found
  bool refined = false;
};

/// max over the columns u of `directions` of the l2 mass of the s largest
/// coordinates of Gamma u. With `ascent`, the best `restarts` directions are
/// pushed uphill by u <- grad / ||grad||, which never decreases the
/// (convex) objective.
HsmEstimate H_sm(const GammaRealization& g, int s, const Eigen::Ref<const Matrix>& directions,
                 const AscentOptions* ascent = nullptr);

/// xi_u: the largest |<X_i,u>| / sqrt(m) outside the s largest. 1 <= s < m.
double xi(const GammaRealization& g, const Eigen::Ref<const Vector>& u, int s);

// --- nets ------------------------------------------------------------------

/// Randomized greedy epsilon-separated subset of S^{d-1}.
struct Net {
  int d = 0;
  double epsilon = 0.0;
  Matrix points;  // d x size, unit columns
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  bool complete = false;           // stopped by the rejection rule, not max_points
  long certificate_probes = 0;     // consecutive covered probes in the final check
  long candidates = 0;

  int size() const { return static_cast<int>(points.cols()); }
};

/// Greedy packing: accept sphere samples at distance >= epsilon from every
/// accepted point; stop after 50 |accepted| consecutive rejections. The
/// covering certificate then checks 10 |points| fresh probes; an uncovered
/// probe is added and the certificate restarts. Reaching max_points first
/// leaves complete = false.
Net build_net(int d, double epsilon, const RngStream& rng, int max_points);

/// Smallest pairwise distance (infinity for fewer than two points).
double min_pairwise_distance(const Net& net);

// --- decomposition ---------------------------------------------------------

/// Split of (1/sqrt(m)) sum_i <X_i,u> Z_i into the large-coordinate part
/// (clubs), the large-||Z_j|| part outside it (diamonds) and the rest
/// (hearts).
struct Decomposition {
  Vector clubs;
  Vector diamonds;
  Vector hearts;
  Vector full;
  std::vector<Eigen::Index> i_large;  // s indices, largest |<X_i,u>| first
  std::vector<Eigen::Index> j_big;    // ascending, over all of 1..m
  long j_outside = 0;                 // |I_large^c ∩ J_big|
  double xi = 0.0;
  int s = 0;
  long r = 0;
};

/// ||Z_j|| for every column of D.
Vector z_column_norms(const DRealization& dr, const NormSpace& space);

Decomposition decompose(const GammaRealization& g, const DRealization& dr, const NormSpace& space,
                        const Eigen::Ref<const Vector>& u, int s, long r, double phi_value);

/// Same, reusing precomputed column norms.
Decomposition decompose(const GammaRealization& g, const DRealization& dr, const NormSpace& space,
                        const Eigen::Ref<const Vector>& u, int s, long r, double phi_value,
                        const Eigen::Ref<const Vector>& column_norms);

// --- parameter defaults ----------------------------------------------------

/// floor(c1 d* / log(e m / d*)), at least 1 and at most m - 1.
int default_s(double dstar, int m, double c1 = 1.0);

/// floor(c2 min(eps^2 d*, s)), at least 1.
long default_r(double dstar, double epsilon, int s, double c2 = 1.0);

}  // namespace dmlab
