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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dmlab/distributions.hpp"
#include "dmlab/ensemble.hpp"
#include "dmlab/normspace.hpp"
#include "dmlab/structure.hpp"

namespace dmlab {

/// Named substreams of a run's master seed.
namespace streams {
inline constexpr std::uint64_t kGamma = 1;
inline constexpr std::uint64_t kD = 2;
inline constexpr std::uint64_t kNet = 3;
inline constexpr std::uint64_t kLambda = 4;
inline constexpr std::uint64_t kSpread = 5;
inline constexpr std::uint64_t kGauss = 6;
inline constexpr std::uint64_t kProfile = 7;
inline constexpr std::uint64_t kBaseline = 8;
}  // namespace streams

/// Seed of trial t in a multi-trial experiment. Depends only on (seed, t),
/// so sweeps over m or n see matched realizations.
std::uint64_t trial_seed(std::uint64_t seed, int trial);

// --- individual diagnostics ------------------------------------------------

struct LambdaEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  bool degenerate = false;  // ||Gamma v||_2 < 1e-12
};

/// Monte Carlo estimate of E_Z Psi(v) with Gamma fixed; draw k uses a fresh
/// D keyed by rng.substream(k).
LambdaEstimate estimate_lambda(const GammaRealization& g, const DistributionSpec& zspec, const NormSpace& space,
                               const Eigen::Ref<const Vector>& v, long n_draws, const RngStream& rng);

struct SmallBall {
  long count = 0;       // |{i : |<X_i, v>| >= eta}|
  double required = 0;  // delta m
  bool passes = false;
};

SmallBall check_small_ball(const GammaRealization& g, const Eigen::Ref<const Vector>& v, double eta, double delta);

struct Oscillation {
  double value = 0.0;  // max_k |Psi(u_k) / lambda - 1|
  Vector psi;          // Psi at every net point, in net order
};

/// Net oscillation. Psi is evaluated through the n x d composite D Gamma.
Oscillation oscillation(const GammaRealization& g, const DRealization& dr, const NormSpace& space, const Net& net,
                        double lambda);

/// max_k |psi_k / lambda - 1| for a precomputed table.
double oscillation_from_table(const Eigen::Ref<const Vector>& psi, double lambda);

struct Spread {
  double spread = 0.0;     // max over pairs of |mean Psi(u_a) - mean Psi(u_b)|
  double std_error = 0.0;  // of the paired difference for the maximizing pair
  int pair_a = 0;
  int pair_b = 0;
  Vector means;            // per probe
  Matrix pair_diff;        // |mean difference| per pair (symmetric)
};

/// Conditional-mean spread over probe directions (d x k, k >= 2) with
/// common random numbers: every draw applies one D to all probes.
Spread conditional_mean_spread(const GammaRealization& g, const DistributionSpec& zspec, const NormSpace& space,
                               const Eigen::Ref<const Matrix>& probes, long n_draws, const RngStream& rng);

struct BaselineGap {
  double ratio = 1.0;
  double max_norm = 0.0;
  double min_norm = 0.0;
};

/// Gamma = identity on R^m: max/min of ||D x|| over x in {e_1..e_min(m,10),
/// (1,..,1)/sqrt(m)}, a lower bound for sup/inf over S^{m-1}.
BaselineGap baseline_gap(int n, int m, const NormSpace& space, const DistributionSpec& zspec, const RngStream& rng);

// --- pipeline --------------------------------------------------------------

/// Where the functionals of a max-dot space come from.
struct SpaceSpec {
  NormFamily family = NormFamily::kLp;
  double p = 2.0;
  int n = 0;
  std::string rows_path;  // CSV of functionals (max-dot)
  Matrix rows;            // in-memory functionals, used when rows_path is empty
};

NormSpace build_space(const SpaceSpec& spec);

enum class GammaMode { kRandom, kIdentity };

struct Thresholds {
  double osc_max = 0.35;
  double cond3_max = 0.1;  // in units of E||G||
  double lambda_ratio_min = 0.1;
  double lambda_ratio_max = 10.0;
  double rho_max = 1.0;
  double beta = 1.0;                   // H_sm / sqrt(s) <= beta / d*
  std::optional<double> rearr_max;     // defaults to epsilon
  std::optional<double> theta;         // clubs, diamonds <= theta E||G||; defaults to epsilon
};

struct CertifyConfig {
  SpaceSpec space;
  int d = 3;
  int m = 1024;
  double epsilon = 0.15;
  DistributionSpec xspec = DistributionSpec::rotinv(3);
  DistributionSpec zspec = DistributionSpec::rademacher(1);
  GammaMode gamma = GammaMode::kRandom;
  std::optional<int> s;
  std::optional<long> r;
  double c1 = 1.0;
  double c2 = 1.0;
  long lambda_samples = 200;
  long spread_draws = 200;
  int probe_count = 10;
  int net_max_points = 20000;
  long gauss_samples = 100000;
  std::optional<long> profile_samples;
  double phi_scale = 1.0;
  double sb_eta = 0.2;
  double sb_delta = 0.2;
  int anchor = 0;
  bool h_ascent = false;
  bool baseline = false;
  int baseline_m = 64;
  DStorage storage = DStorage::kAuto;
  Thresholds thresholds;
  int trials = 1;
  std::uint64_t seed = 1;

  /// Throws ConfigError on any violated constraint.
  void validate() const;
};

struct DecompositionSummary {
  double clubs = 0.0;
  double diamonds = 0.0;
  double hearts = 0.0;
  double xi = 0.0;
  long j_outside = 0;
  long j_big = 0;
};

struct CertifyReport {
  // space
  double egn = 0.0;
  double egn_std_error = 0.0;
  std::string egn_method;
  double dual_radius = 0.0;
  double dstar = 0.0;
  double dstar_std_error = 0.0;
  double d_cap = 0.0;
  // parameters
  int d = 0;
  int m = 0;
  int n = 0;
  int s = 0;
  long r = 0;
  double phi = 0.0;
  // structure of Gamma
  RhoReport rho;
  double h_sm = 0.0;
  std::optional<double> rearr_dev;
  double w2_diam = 0.0;
  SmallBall small_ball;
  // Z-side
  double lambda = 0.0;
  double lambda_std_error = 0.0;
  double lambda_ratio = 0.0;
  double oscillation = 0.0;
  double cond3_spread = 0.0;
  double cond3_std_error = 0.0;
  double kappa = 0.0;
  std::optional<double> baseline_gap;
  DecompositionSummary decomposition;
  // bookkeeping
  int net_size = 0;
  long net_candidates = 0;
  bool d_materialized = true;
  Vector per_direction;  // Psi at net point k
  std::map<std::string, bool> pass;
  std::vector<std::string> warnings;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;  // not part of the replayable output

  bool all_pass() const;
};

/// Full pipeline: Gamma, its structural diagnostics, a net, D, Lambda at
/// the anchor net point, net oscillation, conditional-mean spread on up to
/// probe_count directions, and the pass flags.
CertifyReport certify(const CertifyConfig& config);

/// Up to `count` net columns: the anchor first, then evenly spaced points.
Matrix probe_directions(const Net& net, int anchor, int count);

}  // namespace dmlab
