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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "dmlab/ensemble.hpp"
#include "dmlab/jacobi.hpp"
#include "dmlab/parallel.hpp"

using namespace dmlab;

namespace {

// Roots of the characteristic polynomial of a symmetric 3x3 matrix by the
// trigonometric form of Cardano's formula, ascending.
std::array<double, 3> cubic_eigenvalues(const Eigen::Matrix3d& a) {
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double q = a.trace() / 3.0;
  const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) + (a(2, 2) - q) * (a(2, 2) - q) +
                    2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  const Eigen::Matrix3d b = (a - q * Eigen::Matrix3d::Identity()) / p;
  const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  const double e2 = 3.0 * q - e1 - e3;
  std::array<double, 3> out{e1, e2, e3};
  std::sort(out.begin(), out.end());
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

}  // namespace

TEST_CASE("draw_gamma") {
  const RngStream rng(1, 2);
  const GammaRealization a = draw_gamma(3, 50, DistributionSpec::rotinv(3), rng);
  const GammaRealization b = draw_gamma(3, 50, DistributionSpec::rotinv(3), rng);
  CHECK(a.rows == b.rows);
  CHECK(a.m() == 50);
  CHECK(a.d() == 3);

  const GammaRealization longer = draw_gamma(3, 80, DistributionSpec::rotinv(3), rng);
  CHECK(longer.rows.topRows(50) == a.rows);

  const GammaRealization signs = draw_gamma(1, 64, DistributionSpec::rademacher(1), rng);
  CHECK((signs.rows.array().abs() == 1.0).all());

  CHECK_THROWS_AS(draw_gamma(4, 3, DistributionSpec::gaussian(4), rng), ConfigError);

  const GammaRealization gauss = draw_gamma(3, 1000, DistributionSpec::gaussian(3), RngStream(4, 0));
  const Eigen::RowVectorXd second = gauss.rows.array().square().colwise().mean();
  CHECK((second.array() - 1.0).abs().maxCoeff() < 0.15);
}

TEST_CASE("apply_gamma") {
  const GammaRealization g = draw_gamma(3, 20, DistributionSpec::gaussian(3), RngStream(5, 0));
  CHECK(apply_gamma(g, Vector::Zero(3)).isZero(0.0));

  const GammaRealization ones = gamma_from_rows(RowMatrix::Ones(16, 1));
  Vector c(1);
  c << 2.5;
  CHECK((apply_gamma(ones, c).array() == 2.5 / 4.0).all());

  const Vector u = Vector::Random(3), w = Vector::Random(3);
  CHECK((apply_gamma(g, u + w) - apply_gamma(g, u) - apply_gamma(g, w)).cwiseAbs().maxCoeff() < 1e-12);
  for (int i = 0; i < g.m(); ++i) {
    CHECK(apply_gamma(g, u)[i] == doctest::Approx(g.rows.row(i).dot(u) / std::sqrt(20.0)).epsilon(1e-14));
  }
  Matrix both(3, 2);
  both << u, w;
  const Matrix cols = apply_gamma_columns(g, both);
  CHECK(cols.col(0) == apply_gamma(g, u));
  CHECK_THROWS_AS(apply_gamma(g, Vector::Zero(2)), ConfigError);

  const GammaRealization id = identity_gamma(3);
  CHECK((apply_gamma(id, u) - u).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("apply_D") {
  for (const DistributionSpec& zspec : {DistributionSpec::rademacher(1), DistributionSpec::gaussian(1)}) {
    const DRealization dr = DRealization::draw(37, 130, zspec, RngStream(6, 1));
    CAPTURE(to_string(zspec.kind));
    CHECK(dr.apply(Vector::Zero(130)).isZero(0.0));
    for (int j : {0, 63, 64, 127, 129}) {
      Vector e = Vector::Zero(130);
      e[j] = 1.0;
      CHECK(dr.apply(e) == dr.column(j));
      CHECK(apply_D(dr, e) == dr.column(j));
    }
    const Vector y = Vector::Random(130);
    CHECK((dr.apply(y) - dr.dense() * y).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(dr.apply(Vector::Zero(129)), ConfigError);
  }
  const DRealization signs = DRealization::draw(10, 70, DistributionSpec::rademacher(1), RngStream(6, 2));
  CHECK((signs.dense().array().abs() == 1.0).all());
  CHECK_THROWS_AS(DRealization::draw(3, 3, DistributionSpec::rotinv(1), RngStream(1, 0)), ConfigError);
}

TEST_CASE("materialized and regenerated storage agree exactly") {
  for (const DistributionSpec& zspec : {DistributionSpec::rademacher(1), DistributionSpec::gaussian(1)}) {
    CAPTURE(to_string(zspec.kind));
    const RngStream rng(7, 3);
    const DRealization mat = DRealization::draw(41, 300, zspec, rng, DStorage::kMaterialized);
    const DRealization reg = DRealization::draw(41, 300, zspec, rng, DStorage::kRegenerated);
    CHECK(mat.materialized());
    CHECK_FALSE(reg.materialized());
    CHECK(mat.dense() == reg.dense());
    CHECK(reg.dense() == reg.dense());
    for (int j : {0, 150, 299}) CHECK(mat.column(j) == reg.column(j));
    CHECK(mat.entry(40, 299) == reg.entry(40, 299));
    const Matrix ys = Matrix::Random(300, 3);
    CHECK(mat.apply_columns(ys) == reg.apply_columns(ys));
  }
  const DRealization small = DRealization::draw(8, 8, DistributionSpec::rademacher(1), RngStream(1, 0));
  CHECK(small.materialized());
}

TEST_CASE("apply_D does not depend on the worker count") {
  const DRealization dr = DRealization::draw(200, 500, DistributionSpec::gaussian(1), RngStream(8, 0),
                                             DStorage::kRegenerated);
  const Matrix ys = Matrix::Random(500, 4);
  set_worker_count(1);
  const Matrix one = dr.apply_columns(ys);
  set_worker_count(3);
  const Matrix three = dr.apply_columns(ys);
  set_worker_count(1);
  CHECK(one == three);
}

TEST_CASE("sign bits round trip") {
  const DRealization dr = DRealization::draw(13, 77, DistributionSpec::rademacher(1), RngStream(9, 0));
  const auto bits = dr.sign_bits();
  CHECK(bits.size() == (13u * 77u + 7u) / 8u);
  const DRealization back = DRealization::from_sign_bits(13, 77, bits);
  CHECK(back.dense() == dr.dense());
  CHECK(back.entry(0, 0) == (((bits[0] & 1u) != 0) ? 1.0 : -1.0));
  CHECK_THROWS_AS(DRealization::from_sign_bits(13, 77, std::vector<std::uint8_t>(3)), ConfigError);
  const DRealization gauss = DRealization::draw(2, 2, DistributionSpec::gaussian(1), RngStream(1, 0));
  CHECK_THROWS_AS(gauss.sign_bits(), ConfigError);
}

TEST_CASE("realization dump round trip") {
  const GammaRealization g = draw_gamma(3, 90, DistributionSpec::rotinv(3), RngStream(10, 1));
  const DRealization dr = DRealization::draw(17, 90, DistributionSpec::rademacher(1), RngStream(10, 2));
  const auto path = (std::filesystem::temp_directory_path() / "dmlab_test_realization.bin").string();
  write_realization(path, g, dr, 10);
  const StoredRealization back = read_realization(path);
  CHECK(back.seed == 10);
  CHECK(back.gamma.rows == g.rows);
  CHECK(back.d.dense() == dr.dense());
  CHECK(std::filesystem::file_size(path) == 5 + 32 + 90 * 3 * 8 + (17 * 90 + 7) / 8);
  std::filesystem::resize_file(path, 40);
  CHECK_THROWS_AS(read_realization(path), ConfigError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_realization(path), ConfigError);
}

TEST_CASE("psi") {
  const GammaRealization g = draw_gamma(2, 6, DistributionSpec::gaussian(2), RngStream(11, 0));
  const NormSpace linf = NormSpace::lp(4, std::numeric_limits<double>::infinity());
  const DRealization zero = DRealization::from_dense(Matrix::Zero(4, 6));
  Vector u(2);
  u << 0.6, 0.8;
  CHECK(psi(g, zero, linf, u) == 0.0);
  CHECK_THROWS_AS(psi(g, zero, linf, Vector(u * 1.01)), ConfigError);
  CHECK_THROWS_AS(psi(g, zero, NormSpace::lp(5, 2.0), u), ConfigError);

  const GammaRealization one = gamma_from_rows(RowMatrix::Ones(1, 1));
  Matrix e1 = Matrix::Zero(3, 1);
  e1(0, 0) = 1.0;
  CHECK(psi(one, DRealization::from_dense(e1), NormSpace::lp(3, std::numeric_limits<double>::infinity()),
            Vector::Ones(1)) == 1.0);

  const DRealization signs = DRealization::draw(4, 6, DistributionSpec::rademacher(1), RngStream(11, 1));
  CHECK(psi(g, signs, linf, u) == psi(g, signs, linf, Vector(-u)));

  const Matrix comp = composite(g, signs);
  CHECK((comp * u - signs.apply(apply_gamma(g, u))).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("psi mean with gaussian columns in l2") {
  const int n = 50, m = 40;
  const GammaRealization g = draw_gamma(3, m, DistributionSpec::rotinv(3), RngStream(12, 0));
  const NormSpace l2 = NormSpace::lp(n, 2.0);
  const Vector u = Vector::Ones(3) / std::sqrt(3.0);
  const RngStream rng(12, 1);
  std::vector<double> values(500);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const DRealization dr = DRealization::draw(n, m, DistributionSpec::gaussian(1), rng.substream(k));
    values[k] = psi(g, dr, l2, u);
  }
  const MeanStderr est = mean_and_stderr(values);
  const double expected = apply_gamma(g, u).norm() * expected_gauss_norm(l2, 0, rng).mean;
  CHECK(std::abs(est.mean - expected) < 3.0 * est.std_error);
}

TEST_CASE("rho") {
  const GammaRealization signs = draw_gamma(1, 33, DistributionSpec::rademacher(1), RngStream(13, 0));
  CHECK(rho(signs).rho == doctest::Approx(0.0).epsilon(1e-15));

  RowMatrix rows(2, 2);
  rows << 1, 0, 0, 2;
  const RhoReport r = rho(gamma_from_rows(rows));
  CHECK(r.lambda_min_sq == doctest::Approx(0.5));
  CHECK(r.lambda_max_sq == doctest::Approx(2.0));
  CHECK(r.rho == doctest::Approx(1.0));

  CHECK(rho(identity_gamma(4)).rho < 1e-15);

  RowMatrix bad = RowMatrix::Ones(3, 2);
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(rho(gamma_from_rows(bad)), NumericalError);
}

TEST_CASE("rho sandwiches the squared norm of Gamma u") {
  const GammaRealization g = draw_gamma(4, 60, DistributionSpec::rotinv(4), RngStream(14, 0));
  const RhoReport r = rho(g);
  CHECK(r.lambda_min_sq <= r.lambda_max_sq);
  RngStream dirs(14, 1);
  for (int k = 0; k < 100; ++k) {
    const Vector u = sample_sphere(4, dirs);
    const double sq = apply_gamma(g, u).squaredNorm();
    CHECK(sq >= r.lambda_min_sq - 1e-10);
    CHECK(sq <= r.lambda_max_sq + 1e-10);
    CHECK(sq >= 1.0 - r.rho - 1e-10);
    CHECK(sq <= 1.0 + r.rho + 1e-10);
  }
}

TEST_CASE("jacobi eigenvalues") {
  Eigen::Matrix3d a;
  a << 4, 1, -2, 1, 2, 0.5, -2, 0.5, 3;
  const auto eig = jacobi_eigen(a);
  // numpy.linalg.eigvalsh
  CHECK(eig.eigenvalues[0] == doctest::Approx(0.65392377).epsilon(1e-8));
  CHECK(eig.eigenvalues[1] == doctest::Approx(2.71634847).epsilon(1e-8));
  CHECK(eig.eigenvalues[2] == doctest::Approx(5.62972777).epsilon(1e-8));
  CHECK(eig.off_norm <= 1e-12);
  const Eigen::Matrix3d rebuilt = eig.eigenvectors * eig.eigenvalues.asDiagonal() * eig.eigenvectors.transpose();
  CHECK((rebuilt - a).cwiseAbs().maxCoeff() < 1e-12);

  RngStream r(15, 0);
  for (int k = 0; k < 200; ++k) {
    Eigen::Matrix3d x;
    for (int i = 0; i < 9; ++i) x.data()[i] = r.gaussian();
    const Eigen::Matrix3d gram = x.transpose() * x;
    const auto ours = jacobi_eigen(gram);
    const auto cubic = cubic_eigenvalues(gram);
    for (int i = 0; i < 3; ++i) REQUIRE(std::abs(ours.eigenvalues[i] - cubic[static_cast<std::size_t>(i)]) < 1e-9);
  }
  CHECK_THROWS_AS(jacobi_eigen(Matrix(2, 3)), ConfigError);
}

TEST_CASE("rho at m = 3e4 with gaussian rows") {
  const int d = 3, m = 30000, trials = 50;
  int within = 0;
  for (int t = 0; t < trials; ++t) {
    const GammaRealization g = draw_gamma(d, m, DistributionSpec::gaussian(d), RngStream(16, t));
    if (rho(g).rho <= 5.0 * std::sqrt(static_cast<double>(d) / m)) ++within;
  }
  CHECK(within >= 48);
}

TEST_CASE("rho decays like sqrt(d/m)") {
  const int d = 20;
  std::vector<double> medians;
  for (int m : {400, 1600, 6400}) {
    std::vector<double> rs;
    for (int t = 0; t < 20; ++t) rs.push_back(rho(draw_gamma(d, m, DistributionSpec::gaussian(d), RngStream(17 + m, t))).rho);
    medians.push_back(median(rs));
  }
  for (std::size_t k = 1; k < medians.size(); ++k) {
    const double factor = medians[k - 1] / medians[k];
    CAPTURE(factor);
    CHECK(factor >= 1.5);
    CHECK(factor <= 3.0);
  }
}
