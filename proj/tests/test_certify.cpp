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

#include <doctest.h>

#include <cmath>
#include <limits>

#include "dmlab/certify.hpp"
#include "dmlab/cli.hpp"
#include "dmlab/config.hpp"

using namespace dmlab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CertifyConfig small_config() {
  CertifyConfig c;
  c.space.family = NormFamily::kLp;
  c.space.p = kInf;
  c.space.n = 64;
  c.d = 3;
  c.m = 256;
  c.epsilon = 0.3;
  c.xspec = DistributionSpec::rotinv(3);
  c.zspec = DistributionSpec::rademacher(1);
  c.lambda_samples = 10;
  c.spread_draws = 10;
  c.profile_samples = 100L * 256;
  c.baseline = true;
  c.baseline_m = 8;
  c.seed = 5;
  return c;
}

}  // namespace

TEST_CASE("trial seeds") {
  CHECK(trial_seed(1, 0) == trial_seed(1, 0));
  CHECK(trial_seed(1, 0) != trial_seed(1, 1));
  CHECK(trial_seed(1, 0) != trial_seed(2, 0));
  CHECK(trial_seed(0, 0) == mix64(0x9e3779b97f4a7c15ull));
}

TEST_CASE("lambda with gaussian columns in l2") {
  const int n = 128, m = 200;
  const GammaRealization g = draw_gamma(3, m, DistributionSpec::rotinv(3), RngStream(1, 0));
  const NormSpace l2 = NormSpace::lp(n, 2.0);
  const Vector v = Vector::Unit(3, 1);
  const LambdaEstimate est = estimate_lambda(g, DistributionSpec::gaussian(1), l2, v, 400, RngStream(1, 1));
  CHECK_FALSE(est.degenerate);
  const double expected = apply_gamma(g, v).norm() * expected_gauss_norm(l2, 0, RngStream(1, 2)).mean;
  CHECK(std::abs(est.mean - expected) < 3.0 * est.std_error);
  CHECK(est.std_error > 0.0);

  const LambdaEstimate again = estimate_lambda(g, DistributionSpec::gaussian(1), l2, v, 400, RngStream(1, 1));
  CHECK(again.mean == est.mean);

  CHECK_THROWS_AS(estimate_lambda(g, DistributionSpec::gaussian(1), l2, v, 1, RngStream(1, 1)), ConfigError);
}

TEST_CASE("lambda flags a vanishing Gamma v") {
  RowMatrix rows = RowMatrix::Zero(4, 2);
  rows.col(0).setOnes();
  const GammaRealization g = gamma_from_rows(rows);
  const LambdaEstimate est =
      estimate_lambda(g, DistributionSpec::rademacher(1), NormSpace::lp(8, kInf), Vector::Unit(2, 1), 5, RngStream(2, 0));
  CHECK(est.degenerate);
  CHECK(est.mean == 0.0);
}

TEST_CASE("lambda with sign columns in l_inf is of order E||G||") {
  const int n = 1024, m = 4096;
  const NormSpace linf = NormSpace::lp(n, kInf);
  const double egn = expected_gauss_norm(linf, 0, RngStream(3, 0)).mean;
  const GammaRealization g = draw_gamma(3, m, DistributionSpec::rotinv(3), RngStream(3, 1));
  const LambdaEstimate est =
      estimate_lambda(g, DistributionSpec::rademacher(1), linf, Vector::Unit(3, 0), 20, RngStream(3, 2));
  CHECK(est.mean / egn >= 0.1);
  CHECK(est.mean / egn <= 10.0);
}

TEST_CASE("small ball") {
  RowMatrix rows = RowMatrix::Zero(10, 3);
  rows.col(0).setOnes();
  const GammaRealization g = gamma_from_rows(rows);
  const SmallBall all = check_small_ball(g, Vector::Unit(3, 0), 0.5, 1.0);
  CHECK(all.count == 10);
  CHECK(all.passes);
  const SmallBall none = check_small_ball(g, Vector::Unit(3, 0), 1.5, 0.1);
  CHECK(none.count == 0);
  CHECK_FALSE(none.passes);
  CHECK_THROWS_AS(check_small_ball(g, Vector::Unit(3, 0), 0.0, 0.1), ConfigError);

  int passes = 0;
  for (int t = 0; t < 20; ++t) {
    const GammaRealization h = draw_gamma(3, 4096, DistributionSpec::rotinv(3), RngStream(4, t));
    if (check_small_ball(h, Vector::Unit(3, 2), 0.2, 0.2).passes) ++passes;
  }
  CHECK(passes >= 18);
}

TEST_CASE("small ball implies a lower bound on lambda") {
  const int n = 256, m = 1024;
  const NormSpace linf = NormSpace::lp(n, kInf);
  const double egn = expected_gauss_norm(linf, 0, RngStream(5, 0)).mean;
  int coupled = 0, checked = 0;
  for (int t = 0; t < 10; ++t) {
    const GammaRealization g = draw_gamma(3, m, DistributionSpec::rotinv(3), RngStream(5, t + 1));
    const Vector v = Vector::Ones(3) / std::sqrt(3.0);
    if (!check_small_ball(g, v, 0.2, 0.2).passes) continue;
    ++checked;
    const LambdaEstimate est = estimate_lambda(g, DistributionSpec::rademacher(1), linf, v, 10, RngStream(5, 100 + t));
    if (est.mean > 0.05 * egn) ++coupled;
  }
  CHECK(checked >= 9);
  CHECK(coupled >= 0.9 * checked);
}

TEST_CASE("oscillation") {
  RowMatrix rows(4, 2);
  rows << std::sqrt(2.0), 0, 0, std::sqrt(2.0), std::sqrt(2.0), 0, 0, std::sqrt(2.0);
  const GammaRealization g = gamma_from_rows(rows);
  CHECK(rho(g).rho < 1e-15);
  const NormSpace l2 = NormSpace::lp(32, 2.0);
  const DRealization dr = DRealization::draw(32, 4, DistributionSpec::gaussian(1), RngStream(6, 0));
  const Net net = build_net(2, 0.2, RngStream(6, 1), 1000);
  const Oscillation first = oscillation(g, dr, l2, net, 1.0);
  const double lambda = first.psi.mean();
  const Oscillation osc = oscillation(g, dr, l2, net, lambda);
  CHECK(osc.psi.size() == net.size());
  CHECK(osc.value == oscillation_from_table(osc.psi, lambda));
  CHECK(osc.value == doctest::Approx((osc.psi.array() / lambda - 1.0).abs().maxCoeff()));
  for (int k = 0; k < net.size(); ++k) {
    REQUIRE(std::abs(osc.psi[k] - psi(g, dr, l2, net.points.col(k))) <= 1e-12 * osc.psi[k]);
  }

  Net single;
  single.d = 2;
  single.epsilon = 1.0;
  single.points = net.points.leftCols(1);
  const double at_v = psi(g, dr, l2, net.points.col(0));
  CHECK(oscillation(g, dr, l2, single, at_v).value == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(oscillation(g, dr, l2, net, 0.0), ConfigError);
}

TEST_CASE("conditional mean spread") {
  const int n = 96, m = 300;
  const GammaRealization g = draw_gamma(3, m, DistributionSpec::gaussian(3), RngStream(7, 0));
  const NormSpace l2 = NormSpace::lp(n, 2.0);
  Matrix same(3, 2);
  same.col(0) = same.col(1) = Vector::Unit(3, 0);
  const Spread zero = conditional_mean_spread(g, DistributionSpec::gaussian(1), l2, same, 20, RngStream(7, 1));
  CHECK(zero.spread == 0.0);

  const Net net = build_net(3, 0.5, RngStream(7, 2), 1000);
  const Matrix probes = probe_directions(net, 0, 10);
  CHECK(probes.cols() == 10);
  CHECK(probes.col(0) == net.points.col(0));
  const Spread s = conditional_mean_spread(g, DistributionSpec::gaussian(1), l2, probes, 200, RngStream(7, 3));
  const double egn = expected_gauss_norm(l2, 0, RngStream(7, 4)).mean;
  const Matrix images = apply_gamma_columns(g, probes);
  const double norm_gap = std::abs(images.col(s.pair_a).norm() - images.col(s.pair_b).norm());
  CHECK(s.spread <= 3.0 * s.std_error + egn * norm_gap);
  CHECK(s.spread == s.pair_diff.maxCoeff());
  CHECK(s.pair_diff(s.pair_a, s.pair_b) == s.spread);
  CHECK(s.means.size() == 10);

  CHECK_THROWS_AS(conditional_mean_spread(g, DistributionSpec::gaussian(1), l2, probes.leftCols(1), 20, RngStream(7, 3)),
                  ConfigError);
}

TEST_CASE("probe directions") {
  const Net net = build_net(3, 0.5, RngStream(8, 0), 1000);
  const Matrix p = probe_directions(net, 3, 4);
  CHECK(p.col(0) == net.points.col(3));
  CHECK(p.col(1) == net.points.col((3 + net.size() / 4) % net.size()));
  CHECK(probe_directions(net, 0, 100000).cols() == net.size());
  CHECK_THROWS_AS(probe_directions(net, net.size(), 2), ConfigError);
}

TEST_CASE("baseline gap") {
  const BaselineGap one = baseline_gap(1, 1, NormSpace::lp(1, kInf), DistributionSpec::rademacher(1), RngStream(9, 0));
  CHECK(one.ratio == 1.0);
  const BaselineGap g1 = baseline_gap(1, 1, NormSpace::lp(1, 2.0), DistributionSpec::gaussian(1), RngStream(9, 1));
  CHECK(g1.ratio == 1.0);

  const BaselineGap big =
      baseline_gap(4096, 64, NormSpace::lp(4096, kInf), DistributionSpec::rademacher(1), RngStream(9, 2));
  CHECK(big.min_norm == 1.0);
  CHECK(big.ratio >= 3.0);

  const BaselineGap gauss =
      baseline_gap(512, 16, NormSpace::lp(512, kInf), DistributionSpec::gaussian(1), RngStream(9, 3));
  CHECK(gauss.ratio >= 1.0);
  CHECK_THROWS_AS(baseline_gap(4, 4, NormSpace::lp(5, kInf), DistributionSpec::gaussian(1), RngStream(9, 3)),
                  ConfigError);
}

TEST_CASE("config validation") {
  CertifyConfig c = small_config();
  CHECK_NOTHROW(c.validate());
  c.d = 300;
  c.xspec.dim = 300;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.epsilon = 0.6;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.xspec = DistributionSpec::rotinv(4);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.gamma = GammaMode::kIdentity;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.s = 256;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.profile_samples = 100;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_config();
  c.thresholds.osc_max = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("certify on a small heavy-tailed instance") {
  const CertifyConfig c = small_config();
  const CertifyReport rep = certify(c);
  CHECK(rep.n == 64);
  CHECK(rep.egn_method == "quadrature");
  CHECK(rep.d_cap < 3.0);
  REQUIRE(rep.warnings.size() == 1);
  CHECK(rep.warnings[0].find("cap") != std::string::npos);
  CHECK(rep.per_direction.size() == rep.net_size);
  CHECK(rep.oscillation == oscillation_from_table(rep.per_direction, rep.lambda));
  CHECK(rep.oscillation >= 0.0);
  CHECK(rep.lambda > 0.0);
  CHECK(rep.rearr_dev.has_value());
  CHECK(rep.baseline_gap.has_value());
  CHECK(rep.s >= 1);
  CHECK(rep.r >= 1);
  CHECK(rep.pass.count("oscillation") == 1);
  CHECK(rep.pass.count("rearrangement") == 1);
  CHECK(rep.all_pass() == std::all_of(rep.pass.begin(), rep.pass.end(), [](const auto& kv) { return kv.second; }));

  const CertifyReport again = certify(c);
  CHECK(report_to_json(rep, c).dump() == report_to_json(again, c).dump());
  CHECK(rep.per_direction == again.per_direction);

  CertifyConfig other = c;
  other.seed = 6;
  CHECK(certify(other).lambda != rep.lambda);
}

TEST_CASE("certify failure modes") {
  CertifyConfig c = small_config();
  c.net_max_points = 5;
  try {
    certify(c);
    FAIL("expected an incomplete net");
  } catch (const NumericalError& e) {
    CHECK(e.failure() == NumericalFailure::kIncompleteNet);
  }

  c = small_config();
  c.d = 300;
  CHECK_THROWS_AS(certify(c), ConfigError);
}

TEST_CASE("identity gamma skips the rearrangement diagnostic") {
  CertifyConfig c;
  c.space.p = kInf;
  c.space.n = 256;
  c.d = 3;
  c.m = 3;
  c.gamma = GammaMode::kIdentity;
  c.xspec = DistributionSpec::gaussian(3);
  c.zspec = DistributionSpec::gaussian(1);
  c.lambda_samples = 20;
  c.spread_draws = 10;
  c.seed = 3;
  const CertifyReport rep = certify(c);
  CHECK_FALSE(rep.rearr_dev.has_value());
  CHECK(rep.rho.rho < 1e-15);
  CHECK(rep.pass.count("rearrangement") == 0);
}

TEST_CASE("gaussian sanity configuration") {
  CertifyConfig c = load_config(DMLAB_SOURCE_DIR "/configs/sanity_gaussian.json");
  c.lambda_samples = 20;
  c.spread_draws = 20;
  const CertifyReport rep = certify(c);
  CHECK(rep.oscillation <= 0.1);
  CHECK(rep.lambda_ratio == doctest::Approx(1.0).epsilon(0.05));
  CHECK(rep.pass.at("oscillation"));
  CHECK(rep.pass.at("lambda_window"));
  CHECK(rep.warnings.empty());
}
