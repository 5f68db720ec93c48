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

#include "dmlab/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dmlab/parallel.hpp"

namespace dmlab {

long default_profile_samples(int m) { return std::max(1'000'000L, 100L * m); }

Vector block_quantile_means(const Eigen::Ref<const Vector>& sorted, int m) {
  const std::int64_t n = sorted.size();
  if (n < 1 || m < 1) throw ConfigError("block_quantile_means: empty input");
  // Positions are measured in units of 1/(n m): block i spans [i n, (i+1) n),
  // order statistic k spans [k m, (k+1) m).
  Vector out(m);
  for (std::int64_t i = 0; i < m; ++i) {
    const std::int64_t lo = i * n;
    const std::int64_t hi = (i + 1) * n;
    double acc = 0.0;
    for (std::int64_t k = lo / m; k < n && k * m < hi; ++k) {
      const std::int64_t overlap = std::min(hi, (k + 1) * m) - std::max(lo, k * m);
      if (overlap > 0) acc += sorted[k] * static_cast<double>(overlap);
    }
    out[i] = acc / static_cast<double>(n);
  }
  return out;
}

QuantileProfile quantile_profile(const DistributionSpec& xspec, int m, long n_samples, const RngStream& rng) {
  if (m < 1) throw ConfigError("quantile_profile: m must be >= 1");
  xspec.validate();
  if (!xspec.rotation_invariant()) {
    throw ConfigError("quantile_profile: law " + std::string(to_string(xspec.kind)) +
                      " is not rotation invariant in dimension " + std::to_string(xspec.dim));
  }
  if (n_samples < 100L * m) {
    throw ConfigError("quantile_profile: need n_samples >= 100 m (" + std::to_string(n_samples) + " < " +
                      std::to_string(100L * m) + ")");
  }
  QuantileProfile out;
  out.law = xspec;
  const bool two_point = xspec.kind == DistributionKind::kRademacherIid ||
                         (xspec.kind == DistributionKind::kUniformSphere && xspec.dim == 1);
  if (two_point) {
    Vector support(2);
    support << -1.0, 1.0;
    out.values = block_quantile_means(support, m);
    out.method = ProfileMethod::kExact;
    return out;
  }

  const long half = n_samples / 2;
  constexpr long kChunk = 8192;
  const long chunks = (half + kChunk - 1) / kChunk;
  Vector draws(2 * half);
  parallel_for(chunks, [&](std::ptrdiff_t c) {
    RngStream sub = rng.substream(static_cast<std::uint64_t>(c));
    const long begin = c * kChunk;
    const long end = std::min(half, begin + kChunk);
    for (long k = begin; k < end; ++k) {
      const double x = sample_vector(xspec, sub)[0];
      draws[k] = x;
      draws[half + k] = -x;
    }
  });
  std::sort(draws.data(), draws.data() + draws.size());
  out.values = block_quantile_means(draws, m);
  out.samples = 2 * half;
  out.method = ProfileMethod::kMonteCarlo;
  return out;
}

Vector rearrangement_deviations(const GammaRealization& g, const Eigen::Ref<const Matrix>& directions,
                                const QuantileProfile& profile) {
  if (profile.m() != g.m()) throw ConfigError("rearrangement_deviation: profile length differs from m");
  if (directions.rows() != g.d()) throw ConfigError("rearrangement_deviation: dimension mismatch");
  const Matrix raw = g.rows * directions;  // <X_i, u>, unscaled
  Vector out(directions.cols());
  parallel_for(directions.cols(), [&](std::ptrdiff_t k) {
    const Vector sorted = rearrange_nondecreasing(raw.col(k));
    out[k] = sorted_distance(sorted, profile.values) / std::sqrt(static_cast<double>(g.m()));
  });
  return out;
}

double rearrangement_deviation(const GammaRealization& g, const Eigen::Ref<const Matrix>& directions,
                               const QuantileProfile& profile) {
  const Vector devs = rearrangement_deviations(g, directions, profile);
  return devs.size() ? devs.maxCoeff() : 0.0;
}

HsmEstimate H_sm(const GammaRealization& g, int s, const Eigen::Ref<const Matrix>& directions,
                 const AscentOptions* ascent) {
  if (s < 1 || s > g.m()) throw ConfigError("H_sm: need 1 <= s <= m");
  if (directions.rows() != g.d() || directions.cols() < 1) throw ConfigError("H_sm: bad direction matrix");
  const Matrix images = apply_gamma_columns(g, directions);
  Vector mass(directions.cols());
  parallel_for(directions.cols(), [&](std::ptrdiff_t k) { mass[k] = top_s_mass(images.col(k), s); });

  HsmEstimate best;
  Eigen::Index arg = 0;
  best.value = mass.maxCoeff(&arg);
  best.direction = directions.col(arg);
  if (ascent == nullptr) return best;

  const auto starts = top_magnitude_indices(mass, std::min<Eigen::Index>(ascent->restarts, mass.size()));
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(g.m()));
  for (const Eigen::Index start : starts) {
    Vector u = directions.col(start).normalized();
    for (int step = 0; step < ascent->steps; ++step) {
      const Vector y = apply_gamma(g, u);
      Vector grad = Vector::Zero(g.d());
      for (const Eigen::Index i : top_magnitude_indices(y, s)) grad += (y[i] * inv_sqrt_m) * g.rows.row(i).transpose();
      const double gn = grad.norm();
      if (!(gn > 0.0)) break;
      u = grad / gn;
      const double value = top_s_mass(apply_gamma(g, u), s);
      if (value > best.value) {
        best.value = value;
        best.direction = u;
        best.refined = true;
      }
    }
  }
  return best;
}

double xi(const GammaRealization& g, const Eigen::Ref<const Vector>& u, int s) {
  if (s < 1 || s >= g.m()) throw ConfigError("xi: need 1 <= s < m");
  return kth_largest_magnitude(apply_gamma(g, u), s);
}

// ---------------------------------------------------------------------------

Net build_net(int d, double epsilon, const RngStream& rng, int max_points) {
  if (d < 1) throw ConfigError("build_net: d must be >= 1");
  if (!(epsilon > 0.0 && epsilon <= 2.0)) throw ConfigError("build_net: epsilon must lie in (0, 2]");
  if (max_points < 1) throw ConfigError("build_net: max_points must be >= 1");
  Net net;
  net.d = d;
  net.epsilon = epsilon;
  net.seed = rng.seed();
  net.stream_id = rng.stream_id();
  RngStream stream = rng;

  if (epsilon >= 2.0) {
    // Only antipodal pairs are 2-separated.
    const Vector x = sample_sphere(d, stream);
    net.points.resize(d, std::min(2, max_points));
    net.points.col(0) = x;
    if (max_points >= 2) net.points.col(1) = -x;
    net.complete = max_points >= 2;
    net.candidates = 1;
    return net;
  }

  const double eps2 = epsilon * epsilon;
  Matrix pts(d, std::min(max_points, 1024));
  int count = 0;
  auto nearest_sq = [&](const Vector& x) {
    if (count == 0) return std::numeric_limits<double>::infinity();
    return (pts.leftCols(count).colwise() - x).colwise().squaredNorm().minCoeff();
  };
  auto push = [&](const Vector& x) {
    if (count == pts.cols()) pts.conservativeResize(Eigen::NoChange, std::min<Eigen::Index>(max_points, 2 * pts.cols()));
    pts.col(count++) = x;
  };

  bool exhausted = false;
  long rejections = 0;
  while (!exhausted) {
    const Vector x = sample_sphere(d, stream);
    ++net.candidates;
    if (nearest_sq(x) >= eps2) {
      if (count == max_points) {
        exhausted = true;
        break;
      }
      push(x);
      rejections = 0;
    } else if (++rejections >= 50L * count) {
      break;
    }
  }

  // Covering certificate.
  long covered = 0;
  while (!exhausted && covered < 10L * count) {
    const Vector x = sample_sphere(d, stream);
    if (nearest_sq(x) < eps2) {
      ++covered;
      continue;
    }
    if (count == max_points) {
      exhausted = true;
      break;
    }
    push(x);
    covered = 0;
  }

  net.points = pts.leftCols(count);
  net.complete = !exhausted;
  net.certificate_probes = covered;
  return net;
}

double min_pairwise_distance(const Net& net) {
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < net.size(); ++a)
    for (int b = a + 1; b < net.size(); ++b) best = std::min(best, (net.points.col(a) - net.points.col(b)).norm());
  return best;
}

// ---------------------------------------------------------------------------

Vector z_column_norms(const DRealization& dr, const NormSpace& space) {
  if (space.n() != dr.n()) throw ConfigError("z_column_norms: dimension mismatch");
  if (dr.kind() == DRealization::EntryKind::kRademacher && space.family() == NormFamily::kLp) {
    // Every column is a sign vector: ||Z_j||_p = n^(1/p).
    const double p = space.p();
    const double value = std::isinf(p) ? 1.0 : std::pow(static_cast<double>(dr.n()), 1.0 / p);
    return Vector::Constant(dr.m(), value);
  }
  Vector out(dr.m());
  parallel_for(dr.m(), [&](std::ptrdiff_t j) { out[j] = space(dr.column(static_cast<int>(j))); });
  return out;
}

Decomposition decompose(const GammaRealization& g, const DRealization& dr, const NormSpace& space,
                        const Eigen::Ref<const Vector>& u, int s, long r, double phi_value) {
  return decompose(g, dr, space, u, s, r, phi_value, z_column_norms(dr, space));
}

Decomposition decompose(const GammaRealization& g, const DRealization& dr, const NormSpace& space,
                        const Eigen::Ref<const Vector>& u, int s, long r, double phi_value,
                        const Eigen::Ref<const Vector>& column_norms) {
  if (g.m() != dr.m() || space.n() != dr.n() || u.size() != g.d() || column_norms.size() != g.m()) {
    throw ConfigError("decompose: dimension mismatch");
  }
  if (s < 1 || s >= g.m()) throw ConfigError("decompose: need 1 <= s < m");
  if (!(phi_value > 0.0)) throw ConfigError("decompose: phi must be positive");

  const Vector y = apply_gamma(g, u);
  Decomposition out;
  out.s = s;
  out.r = r;
  out.i_large = top_magnitude_indices(y, s);
  std::vector<char> in_large(static_cast<std::size_t>(g.m()), 0);
  for (const Eigen::Index i : out.i_large) in_large[static_cast<std::size_t>(i)] = 1;

  out.xi = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (!in_large[static_cast<std::size_t>(i)]) out.xi = std::max(out.xi, std::abs(y[i]));

  const double threshold = out.xi * phi_value;
  // Columns of ys: clubs, diamonds, hearts, full.
  Matrix ys = Matrix::Zero(g.m(), 4);
  ys.col(3) = y;
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    const bool big = std::abs(y[j]) * column_norms[j] >= threshold;
    if (big) out.j_big.push_back(j);
    if (in_large[static_cast<std::size_t>(j)]) {
      ys(j, 0) = y[j];
    } else if (big) {
      ys(j, 1) = y[j];
      ++out.j_outside;
    } else {
      ys(j, 2) = y[j];
    }
  }
  const Matrix images = dr.apply_columns(Eigen::Ref<const Matrix>(ys));
  out.clubs = images.col(0);
  out.diamonds = images.col(1);
  out.hearts = images.col(2);
  out.full = images.col(3);
  return out;
}

int default_s(double dstar, int m, double c1) {
  if (m < 1 || !(dstar > 0.0)) throw ConfigError("default_s: need m >= 1 and d* > 0");
  const double raw = c1 * dstar / std::max(1.0, 1.0 + std::log(static_cast<double>(m) / dstar));
  long s = static_cast<long>(std::floor(raw));
  s = std::max(1L, s);
  s = std::min<long>(s, std::max(1, m - 1));
  return static_cast<int>(s);
}

long default_r(double dstar, double epsilon, int s, double c2) {
  const double raw = c2 * std::min(epsilon * epsilon * dstar, static_cast<double>(s));
  return std::max(1L, static_cast<long>(std::floor(raw)));
}

}  // namespace dmlab
