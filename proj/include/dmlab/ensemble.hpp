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
#include <string>
#include <vector>

#include "dmlab/distributions.hpp"
#include "dmlab/normspace.hpp"
#include "dmlab/rng.hpp"
#include "dmlab/types.hpp"

namespace dmlab {

/// One draw of the m x d row matrix (X_i). Rows are stored unscaled;
/// Gamma u = (<X_i, u> / sqrt(m))_i.
struct GammaRealization {
  RowMatrix rows;  // m x d
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  int d() const { return static_cast<int>(rows.cols()); }
  int m() const { return static_cast<int>(rows.rows()); }
};

/// Row i is drawn from rng.substream(i), so realizations with the same rng
/// and growing m share their leading rows. Requires m >= d >= 1.
GammaRealization draw_gamma(int d, int m, const DistributionSpec& xspec, const RngStream& rng);

/// Gamma = identity on R^d (m = d, rows sqrt(d) e_i).
GammaRealization identity_gamma(int d);

GammaRealization gamma_from_rows(RowMatrix rows);

Vector apply_gamma(const GammaRealization& g, const Eigen::Ref<const Vector>& u);

/// Gamma applied to each column of a d x k matrix.
Matrix apply_gamma_columns(const GammaRealization& g, const Eigen::Ref<const Matrix>& directions);

enum class DStorage { kAuto, kMaterialized, kRegenerated };

/// Entries above this count are regenerated on demand instead of stored.
inline constexpr std::int64_t kMaterializeLimit = std::int64_t{1} << 27;

/// One draw of the n x m matrix D whose columns Z_j have iid entries.
///
/// Entries are addressed by (seed, coordinate, column) through the counter
/// RNG, so a regenerated matrix reproduces exactly the entries a
/// materialized one with the same seed stores. Rademacher entries are kept
/// as packed sign bits (bit set means +1).
class DRealization {
 public:
  enum class EntryKind { kRademacher, kGaussian, kDense };

  static DRealization draw(int n, int m, const DistributionSpec& zspec, const RngStream& rng,
                           DStorage storage = DStorage::kAuto);

  /// Arbitrary fixed entries (test fixtures, replay of dumps).
  static DRealization from_dense(Matrix entries);

  /// Materialized Rademacher matrix from row-major sign bits, LSB first.
  static DRealization from_sign_bits(int n, int m, const std::vector<std::uint8_t>& bits);

  int n() const noexcept { return n_; }
  int m() const noexcept { return m_; }
  EntryKind kind() const noexcept { return kind_; }
  bool materialized() const noexcept { return materialized_; }
  std::uint64_t seed() const noexcept { return seed_; }

  double entry(int i, int j) const;
  Vector column(int j) const;
  Matrix dense() const;

  /// D y for y in R^m.
  Vector apply(const Eigen::Ref<const Vector>& y) const;
  /// D Y for an m x k block; each output row accumulates in column order,
  /// independent of the worker count and of the storage mode.
  Matrix apply_columns(const Eigen::Ref<const Matrix>& ys) const;

  /// Row-major sign bits, LSB first (Rademacher only).
  std::vector<std::uint8_t> sign_bits() const;

 private:
  DRealization() = default;

  std::uint64_t row_stream(int i) const;
  void sign_row(int i, std::uint64_t* words) const;
  void gaussian_row(int i, double* out) const;

  int n_ = 0;
  int m_ = 0;
  int words_per_row_ = 0;
  EntryKind kind_ = EntryKind::kDense;
  bool materialized_ = true;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::vector<std::uint64_t> signs_;  // n x words_per_row_
  RowMatrix values_;                  // n x m for gaussian / dense
};

Vector apply_D(const DRealization& dr, const Eigen::Ref<const Vector>& y);

/// Psi(u) = ||D Gamma u||. u must be a unit vector (tolerance 1e-9).
double psi(const GammaRealization& g, const DRealization& dr, const NormSpace& space,
           const Eigen::Ref<const Vector>& u);

/// The n x d matrix D Gamma; column c is D Gamma e_c.
Matrix composite(const GammaRealization& g, const DRealization& dr);

/// Extreme eigenvalues of the Gram form (1/m) sum X_i X_i^T and the
/// deviation rho = max(|lambda_max - 1|, |lambda_min - 1|).
struct RhoReport {
  double rho = 0.0;
  double lambda_min_sq = 0.0;
  double lambda_max_sq = 0.0;
};

RhoReport rho(const GammaRealization& g);

/// Binary replay file: "DMEN1", then n, m, d, seed as little-endian u64,
/// then Gamma rows as row-major little-endian f64, then D as row-major
/// packed sign bits (LSB first).
void write_realization(const std::string& path, const GammaRealization& g, const DRealization& dr,
                       std::uint64_t seed);

struct StoredRealization {
  GammaRealization gamma;
  DRealization d;
  std::uint64_t seed = 0;
};

StoredRealization read_realization(const std::string& path);

}  // namespace dmlab
