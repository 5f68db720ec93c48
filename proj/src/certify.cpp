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

#include "dmlab/certify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include "dmlab/io.hpp"
#include "dmlab/parallel.hpp"
#include "dmlab/rearrangement.hpp"

namespace dmlab {

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  return mix64(seed + 0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(trial) + 1));
}

LambdaEstimate estimate_lambda(const GammaRealization& g, const DistributionSpec& zspec, const NormSpace& space,
                               const Eigen::Ref<const Vector>& v, long n_draws, const RngStream& rng) {
  if (n_draws < 2) throw ConfigError("estimate_lambda: n_draws must be >= 2");
  if (v.size() != g.d()) throw ConfigError("estimate_lambda: direction has wrong dimension");
  const Vector y = apply_gamma(g, v);
  if (y.norm() < 1e-12) return {0.0, 0.0, true};
  std::vector<double> values(static_cast<std::size_t>(n_draws));
  for (long k = 0; k < n_draws; ++k) {
    const DRealization dr =
        DRealization::draw(space.n(), g.m(), zspec, rng.substream(static_cast<std::uint64_t>(k)), DStorage::kRegenerated);
    values[static_cast<std::size_t>(k)] = space(dr.apply(y));
  }
  const MeanStderr ms = mean_and_stderr(values);
  return {ms.mean, ms.std_error, false};
}

SmallBall check_small_ball(const GammaRealization& g, const Eigen::Ref<const Vector>& v, double eta, double delta) {
  if (!(eta > 0.0) || !(delta > 0.0)) throw ConfigError("check_small_ball: eta and delta must be positive");
  const Vector dots = g.rows * v;
  SmallBall out;
  out.count = static_cast<long>((dots.array().abs() >= eta).count());
  out.required = delta * g.m();
  out.passes = static_cast<double>(out.count) >= out.required;
  return out;
}

double oscillation_from_table(const Eigen::Ref<const Vector>& psi, double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("oscillation: lambda must be positive");
  double worst = 0.0;
  for (Eigen::Index k = 0; k < psi.size(); ++k) worst = std::max(worst, std::abs(psi[k] / lambda - 1.0));
  return worst;
}

Oscillation oscillation(const GammaRealization& g, const DRealization& dr, const NormSpace& space, const Net& net,
                        double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("oscillation: lambda must be positive");
  if (net.d != g.d()) throw ConfigError("oscillation: net dimension differs from Gamma");
  const Matrix a = composite(g, dr);
  Oscillation out;
  out.psi.resize(net.size());
  parallel_for(net.size(), [&](std::ptrdiff_t k) {
    out.psi[k] = space(a * net.points.col(k));
  });
  if (!out.psi.allFinite()) throw NumericalError(NumericalFailure::kNonFinite, "oscillation: non-finite norm");
  out.value = oscillation_from_table(out.psi, lambda);
  return out;
}

Spread conditional_mean_spread(const GammaRealization& g, const DistributionSpec& zspec, const NormSpace& space,
                               const Eigen::Ref<const Matrix>& probes, long n_draws, const RngStream& rng) {
  const Eigen::Index k = probes.cols();
  if (k < 2) throw ConfigError("conditional_mean_spread: need at least two probe directions");
  if (n_draws < 2) throw ConfigError("conditional_mean_spread: n_draws must be >= 2");
  const Matrix ys = apply_gamma_columns(g, probes);
  Matrix values(n_draws, k);
  for (long t = 0; t < n_draws; ++t) {
    const DRealization dr =
        DRealization::draw(space.n(), g.m(), zspec, rng.substream(static_cast<std::uint64_t>(t)), DStorage::kRegenerated);
    const Matrix out = dr.apply_columns(ys);
    for (Eigen::Index c = 0; c < k; ++c) values(t, c) = space(out.col(c));
  }

  Spread s;
  s.means.resize(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Vector col = values.col(c);
    s.means[c] = mean_and_stderr({col.data(), static_cast<std::size_t>(col.size())}).mean;
  }
  s.pair_diff = Matrix::Zero(k, k);
  std::vector<double> diffs(static_cast<std::size_t>(n_draws));
  bool first = true;
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a + 1; b < k; ++b) {
      for (long t = 0; t < n_draws; ++t) diffs[static_cast<std::size_t>(t)] = values(t, a) - values(t, b);
      const MeanStderr ms = mean_and_stderr(diffs);
      const double gap = std::abs(ms.mean);
      s.pair_diff(a, b) = s.pair_diff(b, a) = gap;
      if (first || gap > s.spread) {
        s.spread = gap;
        s.std_error = ms.std_error;
        s.pair_a = static_cast<int>(a);
        s.pair_b = static_cast<int>(b);
        first = false;
      }
    }
  }
  return s;
}

BaselineGap baseline_gap(int n, int m, const NormSpace& space, const DistributionSpec& zspec, const RngStream& rng) {
  if (n < 1 || m < 1) throw ConfigError("baseline_gap: n and m must be positive");
  if (space.n() != n) throw ConfigError("baseline_gap: space dimension differs from n");
  const int basis = std::min(m, 10);
  Matrix probes = Matrix::Zero(m, basis + 1);
  for (int j = 0; j < basis; ++j) probes(j, j) = 1.0;
  probes.col(basis).setConstant(1.0 / std::sqrt(static_cast<double>(m)));
  const DRealization dr = DRealization::draw(n, m, zspec, rng);
  const Vector norms = column_norms(space, dr.apply_columns(probes));
  BaselineGap out;
  out.max_norm = norms.maxCoeff();
  out.min_norm = norms.minCoeff();
  if (!(out.min_norm > 0.0) || !std::isfinite(out.max_norm)) {
    throw NumericalError(NumericalFailure::kNonFinite, "baseline_gap: degenerate probe norm");
  }
  out.ratio = out.max_norm / out.min_norm;
  return out;
}

NormSpace build_space(const SpaceSpec& spec) {
  if (spec.family == NormFamily::kLp) {
    if (spec.n < 1) throw ConfigError("space: n must be >= 1");
    return NormSpace::lp(spec.n, spec.p);
  }
  if (!spec.rows_path.empty()) return NormSpace::max_dot(read_functionals_csv(spec.rows_path), spec.rows_path);
  return NormSpace::max_dot(spec.rows);
}

void CertifyConfig::validate() const {
  if (d < 1) throw ConfigError("d must be >= 1");
  if (m < 1) throw ConfigError("m must be >= 1");
  if (d > m) throw ConfigError("d must not exceed m");
  if (!(epsilon > 0.0 && epsilon <= 0.5)) throw ConfigError("epsilon must lie in (0, 1/2]");
  xspec.validate();
  zspec.validate();
  if (xspec.dim != d) throw ConfigError("xspec.dim must equal d");
  if (gamma == GammaMode::kIdentity && m != d) throw ConfigError("identity gamma requires m = d");
  if (s && (*s < 1 || *s >= m)) throw ConfigError("s must satisfy 1 <= s < m");
  if (r && (*r < 1 || *r > m)) throw ConfigError("r must satisfy 1 <= r <= m");
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw ConfigError("c1 and c2 must be positive");
  if (lambda_samples < 2) throw ConfigError("lambda_samples must be >= 2");
  if (spread_draws < 2) throw ConfigError("spread_draws must be >= 2");
  if (probe_count < 2) throw ConfigError("probe_count must be >= 2");
  if (net_max_points < 1) throw ConfigError("net max_points must be >= 1");
  if (gauss_samples < 2) throw ConfigError("gauss_samples must be >= 2");
  if (profile_samples && *profile_samples < 100L * m) throw ConfigError("profile_samples must be >= 100 m");
  if (!(phi_scale > 0.0)) throw ConfigError("phi_scale must be positive");
  if (!(sb_eta > 0.0) || !(sb_delta > 0.0)) throw ConfigError("small-ball eta and delta must be positive");
  if (anchor < 0) throw ConfigError("anchor must be >= 0");
  if (baseline_m < 1) throw ConfigError("baseline m must be >= 1");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (space.family == NormFamily::kLp) {
    if (space.n < 1) throw ConfigError("space: n must be >= 1");
    if (!(space.p >= 1.0)) throw ConfigError("space: p must be >= 1");
  }
  const Thresholds& t = thresholds;
  if (t.osc_max < 0 || t.cond3_max < 0 || t.rho_max < 0 || t.beta < 0) {
    throw ConfigError("thresholds must be nonnegative");
  }
  if (!(t.lambda_ratio_min <= t.lambda_ratio_max)) throw ConfigError("lambda window is empty");
}

bool CertifyReport::all_pass() const {
  return std::all_of(pass.begin(), pass.end(), [](const auto& kv) { return kv.second; });
}

Matrix probe_directions(const Net& net, int anchor, int count) {
  const int size = net.size();
  if (anchor >= size) throw ConfigError("anchor index exceeds the net size");
  const int k = std::min(count, size);
  Matrix out(net.d, k);
  for (int i = 0; i < k; ++i) {
    const long idx = (anchor + static_cast<long>(i) * size / k) % size;
    out.col(i) = net.points.col(idx);
  }
  return out;
}

namespace {

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw NumericalError(NumericalFailure::kNonFinite, std::string("certify: non-finite ") + what);
  }
}

}  // namespace

CertifyReport certify(const CertifyConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  const NormSpace space = build_space(config.space);
  const std::uint64_t seed = config.seed;

  CertifyReport rep;
  rep.seed = seed;
  rep.d = config.d;
  rep.m = config.m;
  rep.n = space.n();

  const GaussNormEstimate gauss = expected_gauss_norm(space, config.gauss_samples, RngStream(seed, streams::kGauss));
  const CriticalDimension dstar = critical_dimension(space, gauss);
  rep.egn = gauss.mean;
  rep.egn_std_error = gauss.std_error;
  rep.egn_method = std::string(to_string(gauss.method));
  rep.dual_radius = dual_radius(space);
  rep.dstar = dstar.value;
  rep.dstar_std_error = dstar.std_error;
  rep.d_cap = config.epsilon * config.epsilon * dstar.value / std::log(1.0 / config.epsilon);
  if (config.d > rep.d_cap) rep.warnings.push_back("d exceeds the recommended cap eps^2 d* / log(1/eps)");

  const int m = config.m;
  rep.s = m == 1 ? 0 : config.s ? *config.s : default_s(dstar.value, m, config.c1);
  rep.r = config.r ? *config.r : std::min<long>(default_r(dstar.value, config.epsilon, rep.s, config.c2), m);
  rep.phi = phi(space, gauss, rep.r, m, config.phi_scale);

  const GammaRealization g = config.gamma == GammaMode::kIdentity
                                 ? identity_gamma(config.d)
                                 : draw_gamma(config.d, m, config.xspec, RngStream(seed, streams::kGamma));

  const Net net = build_net(config.d, config.epsilon, RngStream(seed, streams::kNet), config.net_max_points);
  if (!net.complete) {
    throw NumericalError(NumericalFailure::kIncompleteNet,
                         "certify: net hit max_points before the covering certificate held");
  }
  rep.net_size = net.size();
  rep.net_candidates = net.candidates;
  const Matrix probes = probe_directions(net, config.anchor, config.probe_count);
  const Vector v = net.points.col(config.anchor);

  rep.rho = rho(g);
  if (rep.s >= 1) {
    AscentOptions ascent;
    rep.h_sm = H_sm(g, rep.s, net.points, config.h_ascent ? &ascent : nullptr).value;
  }
  if (config.gamma == GammaMode::kRandom && config.xspec.rotation_invariant()) {
    const long samples = config.profile_samples ? *config.profile_samples : default_profile_samples(m);
    const QuantileProfile profile = quantile_profile(config.xspec, m, samples, RngStream(seed, streams::kProfile));
    rep.rearr_dev = rearrangement_deviation(g, net.points, profile);
  }
  const Matrix gprobes = apply_gamma_columns(g, probes);
  for (Eigen::Index a = 0; a < gprobes.cols(); ++a) {
    for (Eigen::Index b = a + 1; b < gprobes.cols(); ++b) {
      rep.w2_diam = std::max(rep.w2_diam, w2(gprobes.col(a), gprobes.col(b)));
    }
  }
  rep.small_ball = check_small_ball(g, v, config.sb_eta, config.sb_delta);

  const DRealization dr = DRealization::draw(space.n(), m, config.zspec, RngStream(seed, streams::kD), config.storage);
  rep.d_materialized = dr.materialized();

  const LambdaEstimate lam =
      estimate_lambda(g, config.zspec, space, v, config.lambda_samples, RngStream(seed, streams::kLambda));
  require_finite(lam.mean, "lambda");
  if (lam.degenerate || !(lam.mean > 0.0)) {
    throw NumericalError(NumericalFailure::kDegenerateLambda, "certify: Lambda is zero at the anchor direction");
  }
  rep.lambda = lam.mean;
  rep.lambda_std_error = lam.std_error;
  rep.lambda_ratio = lam.mean / gauss.mean;

  const Oscillation osc = oscillation(g, dr, space, net, lam.mean);
  rep.oscillation = osc.value;
  rep.per_direction = osc.psi;

  if (probes.cols() >= 2) {
    const Spread spread =
        conditional_mean_spread(g, config.zspec, space, probes, config.spread_draws, RngStream(seed, streams::kSpread));
    rep.cond3_spread = spread.spread;
    rep.cond3_std_error = spread.std_error;
    for (Eigen::Index a = 0; a < probes.cols(); ++a) {
      for (Eigen::Index b = a + 1; b < probes.cols(); ++b) {
        const double dist = w2(gprobes.col(a), gprobes.col(b));
        if (dist > 0.0) rep.kappa = std::max(rep.kappa, spread.pair_diff(a, b) / (gauss.mean * dist));
      }
    }
  }

  if (rep.s >= 1) {
    const Decomposition dec = decompose(g, dr, space, v, rep.s, rep.r, rep.phi);
    rep.decomposition = {space(dec.clubs), space(dec.diamonds), space(dec.hearts), dec.xi, dec.j_outside,
                         static_cast<long>(dec.j_big.size())};
  }

  if (config.baseline) {
    rep.baseline_gap =
        baseline_gap(space.n(), config.baseline_m, space, config.zspec, RngStream(seed, streams::kBaseline)).ratio;
  }

  for (double x : {rep.egn, rep.dstar, rep.phi, rep.rho.rho, rep.h_sm, rep.w2_diam, rep.lambda_std_error,
                   rep.oscillation, rep.cond3_spread, rep.cond3_std_error, rep.kappa, rep.decomposition.clubs,
                   rep.decomposition.diamonds, rep.decomposition.hearts, rep.decomposition.xi}) {
    require_finite(x, "diagnostic");
  }
  if (rep.rearr_dev) require_finite(*rep.rearr_dev, "rearrangement deviation");

  const Thresholds& t = config.thresholds;
  const double theta = t.theta.value_or(config.epsilon);
  rep.pass["oscillation"] = rep.oscillation <= t.osc_max;
  rep.pass["cond3"] = rep.cond3_spread <= t.cond3_max * gauss.mean;
  rep.pass["lambda_window"] = rep.lambda_ratio >= t.lambda_ratio_min && rep.lambda_ratio <= t.lambda_ratio_max;
  rep.pass["rho"] = rep.rho.rho <= t.rho_max;
  if (rep.s >= 1) {
    rep.pass["h_sm"] = rep.h_sm / std::sqrt(static_cast<double>(rep.s)) <= t.beta / dstar.value;
    rep.pass["clubs"] = rep.decomposition.clubs <= theta * gauss.mean;
    rep.pass["diamonds"] = rep.decomposition.diamonds <= theta * gauss.mean;
    rep.pass["j_outside"] = rep.decomposition.j_outside <= rep.r;
  }
  if (rep.rearr_dev) rep.pass["rearrangement"] = *rep.rearr_dev <= t.rearr_max.value_or(config.epsilon);
  rep.pass["small_ball"] = rep.small_ball.passes;

  rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace dmlab
