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
#include <numbers>

#include "dmlab/distributions.hpp"
#include "dmlab/normspace.hpp"
#include "dmlab/quadrature.hpp"

using namespace dmlab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// High-precision reference values (mpmath, 30 digits) of E max_i |g_i|.
constexpr double kEGaussInf1024 = 3.441870280498579;
constexpr double kEGaussInf4096 = 3.8022953119020604;
constexpr double kEGauss2N100 = 9.9750316395510509;

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("norm values") {
  CHECK(norm(NormSpace::lp(3, kInf), vec({1, -2, 3})) == 3.0);
  CHECK(norm(NormSpace::lp(3, 2.0), vec({1, 0, 0})) == 1.0);
  CHECK(norm(NormSpace::lp(3, 1.0), vec({1, -2, 3})) == 6.0);
  CHECK(norm(NormSpace::lp(2, 3.0), vec({1, 1})) == doctest::Approx(std::cbrt(2.0)));
  Matrix rows(2, 2);
  rows << 1, 1, 1, -1;
  CHECK(norm(NormSpace::max_dot(rows), vec({2, 1})) == 3.0);
  CHECK_THROWS_AS(norm(NormSpace::lp(3, 2.0), vec({1, 2})), ConfigError);
}

TEST_CASE("space validation") {
  CHECK_THROWS_AS(NormSpace::lp(0, 2.0), ConfigError);
  CHECK_THROWS_AS(NormSpace::lp(4, 0.5), ConfigError);
  Matrix zero_row(2, 2);
  zero_row << 1, 0, 0, 0;
  CHECK_THROWS_AS(NormSpace::max_dot(zero_row), ConfigError);
  Matrix rank_deficient(3, 2);
  rank_deficient << 1, 2, 2, 4, -1, -2;
  CHECK_THROWS_AS(NormSpace::max_dot(rank_deficient), ConfigError);
}

TEST_CASE("norm axioms") {
  Matrix functionals(6, 4);
  RngStream fr(1, 0);
  for (Eigen::Index i = 0; i < 6; ++i) functionals.row(i) = sample_gaussian(4, fr).transpose();
  const NormSpace spaces[] = {NormSpace::lp(4, 1.0), NormSpace::lp(4, 1.5), NormSpace::lp(4, 2.0),
                              NormSpace::lp(4, 4.0), NormSpace::lp(4, kInf), NormSpace::max_dot(functionals)};
  RngStream r(2, 0);
  for (const NormSpace& space : spaces) {
    CAPTURE(space.family_tag());
    for (int k = 0; k < 10000; ++k) {
      const Vector x = sample_gaussian(4, r) * std::exp(r.gaussian());
      const Vector y = sample_gaussian(4, r);
      const double lambda = 3.0 * r.gaussian();
      const double nx = space(x), ny = space(y);
      REQUIRE(space(x + y) <= (nx + ny) * (1 + 1e-10));
      REQUIRE(std::abs(space(Vector(lambda * x)) - std::abs(lambda) * nx) <= 1e-10 * std::abs(lambda) * nx + 1e-300);
    }
  }
}

TEST_CASE("max-dot agrees with the support function of conv(+-a_i)") {
  Matrix rows(5, 3);
  RngStream r(3, 0);
  for (Eigen::Index i = 0; i < 5; ++i) rows.row(i) = sample_gaussian(3, r).transpose();
  const NormSpace space = NormSpace::max_dot(rows);
  for (int k = 0; k < 100; ++k) {
    const Vector x = sample_gaussian(3, r);
    double best = -kInf;
    for (Eigen::Index i = 0; i < 5; ++i) {
      best = std::max(best, rows.row(i).dot(x));
      best = std::max(best, (-rows.row(i)).dot(x));
    }
    CHECK(space(x) == best);
  }
}

TEST_CASE("dual radius") {
  CHECK(dual_radius(NormSpace::lp(10, kInf)) == 1.0);
  CHECK(dual_radius(NormSpace::lp(4, 1.0)) == doctest::Approx(2.0));
  CHECK(dual_radius(NormSpace::lp(7, 4.0)) == 1.0);
  CHECK(dual_radius(NormSpace::lp(16, 1.5)) == doctest::Approx(std::pow(16.0, 1.0 / 1.5 - 0.5)));
  Matrix rows(2, 2);
  rows << 3, 4, 1, 0;
  CHECK(dual_radius(NormSpace::max_dot(rows)) == doctest::Approx(5.0));
}

TEST_CASE("closed forms") {
  RngStream r(4, 0);
  const GaussNormEstimate l1 = expected_gauss_norm(NormSpace::lp(100, 1.0), 0, r);
  CHECK(l1.method == GaussMethod::kClosedForm);
  CHECK(l1.mean == doctest::Approx(79.788456080286536).epsilon(1e-14));
  CHECK(l1.std_error == 0.0);
  const GaussNormEstimate l2 = expected_gauss_norm(NormSpace::lp(100, 2.0), 0, r);
  CHECK(l2.mean == doctest::Approx(kEGauss2N100).epsilon(1e-13));
}

TEST_CASE("l_inf quadrature") {
  CHECK(gauss_linf_quadrature(1).value == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-7));
  CHECK(gauss_linf_quadrature(2).value == doctest::Approx(2.0 / std::sqrt(std::numbers::pi)).epsilon(1e-7));
  const auto q1024 = gauss_linf_quadrature(1024);
  const auto q4096 = gauss_linf_quadrature(4096);
  CHECK(std::abs(q1024.value - kEGaussInf1024) <= std::max(q1024.error_bound, 1e-9));
  CHECK(std::abs(q4096.value - kEGaussInf4096) <= std::max(q4096.error_bound, 1e-9));
  CHECK(q4096.error_bound < 1e-5);
}

TEST_CASE("adaptive simpson") {
  const auto r = adaptive_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-10);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-10));
  const auto p = adaptive_simpson([](double x) { return x * x * x; }, 0.0, 2.0, 1e-12, 4);
  CHECK(p.value == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("monte carlo estimates") {
  const NormSpace l2 = NormSpace::lp(100, 2.0);
  const GaussNormEstimate mc2 = expected_gauss_norm(l2, 100000, RngStream(5, 0), GaussMethod::kMonteCarlo);
  CHECK(mc2.method == GaussMethod::kMonteCarlo);
  CHECK(mc2.samples == 100000);
  CHECK(mc2.mean * mc2.mean >= 99.0);
  CHECK(mc2.mean * mc2.mean <= 100.0);
  CHECK(std::abs(mc2.mean - kEGauss2N100) < 4 * mc2.std_error);

  const NormSpace l1 = NormSpace::lp(50, 1.0);
  const GaussNormEstimate mc1 = expected_gauss_norm(l1, 20000, RngStream(6, 0), GaussMethod::kMonteCarlo);
  CHECK(std::abs(mc1.mean - 50 * std::sqrt(2 / std::numbers::pi)) < 4 * mc1.std_error);

  CHECK_THROWS_AS(expected_gauss_norm(l2, 1, RngStream(5, 0), GaussMethod::kMonteCarlo), ConfigError);
  CHECK_THROWS_AS(expected_gauss_norm(l2, 10, RngStream(5, 0), GaussMethod::kQuadrature), ConfigError);
  CHECK_THROWS_AS(expected_gauss_norm(NormSpace::lp(3, 3.0), 10, RngStream(5, 0), GaussMethod::kClosedForm),
                  ConfigError);
}

TEST_CASE("monte carlo stderr follows the 1/sqrt(N) rate") {
  const NormSpace space = NormSpace::lp(64, kInf);
  double ratio2 = 0.0, ratio4 = 0.0;
  const int reps = 5;
  for (int t = 0; t < reps; ++t) {
    const double s1 = expected_gauss_norm(space, 4000, RngStream(7, t), GaussMethod::kMonteCarlo).std_error;
    const double s2 = expected_gauss_norm(space, 8000, RngStream(8, t), GaussMethod::kMonteCarlo).std_error;
    const double s4 = expected_gauss_norm(space, 16000, RngStream(9, t), GaussMethod::kMonteCarlo).std_error;
    ratio2 += s2 / s1 / reps;
    ratio4 += s4 / s1 / reps;
  }
  CHECK(ratio2 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.2));
  CHECK(ratio4 == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("monte carlo is reproducible") {
  const NormSpace space = NormSpace::lp(32, 3.0);
  const auto a = expected_gauss_norm(space, 1000, RngStream(10, 1));
  const auto b = expected_gauss_norm(space, 1000, RngStream(10, 1));
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("critical dimension") {
  RngStream r(11, 0);
  const NormSpace l1 = NormSpace::lp(512, 1.0);
  const CriticalDimension d1 = critical_dimension(l1, expected_gauss_norm(l1, 0, r));
  CHECK(d1.value == doctest::Approx(2.0 * 512 / std::numbers::pi).epsilon(1e-12));

  const NormSpace l2 = NormSpace::lp(100, 2.0);
  const CriticalDimension d2 = critical_dimension(l2, expected_gauss_norm(l2, 0, r));
  CHECK(d2.value >= 99.0);
  CHECK(d2.value <= 100.0);

  const NormSpace linf = NormSpace::lp(4096, kInf);
  const CriticalDimension dinf = critical_dimension(linf, expected_gauss_norm(linf, 0, r));
  CHECK(dinf.value == doctest::Approx(kEGaussInf4096 * kEGaussInf4096).epsilon(1e-6));
  CHECK(dinf.value >= 14.0);
  CHECK(dinf.value <= 18.0);

  GaussNormEstimate g{2.0, 0.1, 100, GaussMethod::kMonteCarlo};
  const CriticalDimension prop = critical_dimension(NormSpace::lp(3, kInf), g);
  CHECK(prop.value == doctest::Approx(4.0));
  CHECK(prop.std_error == doctest::Approx(0.4));

  CHECK_THROWS_AS(critical_dimension(linf, GaussNormEstimate{}), ConfigError);
}

TEST_CASE("critical dimension of l_inf grows like 2 log n") {
  for (int n : {1 << 10, 1 << 12, 1 << 14}) {
    const NormSpace space = NormSpace::lp(n, kInf);
    const double dstar = critical_dimension(space, expected_gauss_norm(space, 0, RngStream(1, 0))).value;
    const double ratio = dstar / (2.0 * std::log(static_cast<double>(n)));
    CAPTURE(n);
    CHECK(ratio >= 0.6);
    CHECK(ratio <= 1.1);
  }
}

TEST_CASE("phi") {
  const NormSpace linf = NormSpace::lp(4096, kInf);
  const GaussNormEstimate g = expected_gauss_norm(linf, 0, RngStream(1, 0));
  CHECK(phi(linf, g, 16, 16384) == doctest::Approx(6.6185821945898759).epsilon(1e-7));
  CHECK(phi(linf, g, 16384, 16384, 2.0) == doctest::Approx(2.0 * (g.mean + 1.0)));
  double previous = kInf;
  for (long r = 1; r <= 1000; ++r) {
    const double value = phi(linf, g, r, 1000);
    REQUIRE(value <= previous);
    previous = value;
  }
  CHECK_THROWS_AS(phi(linf, g, 0, 10), ConfigError);
  CHECK_THROWS_AS(phi(linf, g, 11, 10), ConfigError);
}
