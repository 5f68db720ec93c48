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

#include "dmlab/ensemble.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "dmlab/jacobi.hpp"
#include "dmlab/parallel.hpp"

namespace dmlab {

GammaRealization draw_gamma(int d, int m, const DistributionSpec& xspec, const RngStream& rng) {
  if (d < 1) throw ConfigError("draw_gamma: d must be >= 1");
  if (m < d) throw ConfigError("draw_gamma: need m >= d (m=" + std::to_string(m) + ", d=" + std::to_string(d) + ")");
  DistributionSpec spec = xspec;
  spec.dim = d;
  spec.validate();
  GammaRealization g;
  g.rows.resize(m, d);
  g.seed = rng.seed();
  g.stream_id = rng.stream_id();
  parallel_for(m, [&](std::ptrdiff_t i) {
    RngStream sub = rng.substream(static_cast<std::uint64_t>(i));
    g.rows.row(i) = sample_vector(spec, sub).transpose();
  });
  return g;
}

GammaRealization identity_gamma(int d) {
  if (d < 1) throw ConfigError("identity_gamma: d must be >= 1");
  GammaRealization g;
  g.rows = RowMatrix::Identity(d, d) * std::sqrt(static_cast<double>(d));
  return g;
}

GammaRealization gamma_from_rows(RowMatrix rows) {
  if (rows.rows() < 1 || rows.cols() < 1) throw ConfigError("gamma_from_rows: empty matrix");
  if (rows.rows() < rows.cols()) throw ConfigError("gamma_from_rows: need m >= d");
  GammaRealization g;
  g.rows = std::move(rows);
  return g;
}

Vector apply_gamma(const GammaRealization& g, const Eigen::Ref<const Vector>& u) {
  if (u.size() != g.d()) throw ConfigError("apply_gamma: dimension mismatch");
  return (g.rows * u) / std::sqrt(static_cast<double>(g.m()));
}

Matrix apply_gamma_columns(const GammaRealization& g, const Eigen::Ref<const Matrix>& directions) {
  if (directions.rows() != g.d()) throw ConfigError("apply_gamma: dimension mismatch");
  return (g.rows * directions) / std::sqrt(static_cast<double>(g.m()));
}

// ---------------------------------------------------------------------------

DRealization DRealization::draw(int n, int m, const DistributionSpec& zspec, const RngStream& rng,
                                DStorage storage) {
  if (n < 1 || m < 1) throw ConfigError("DRealization: n and m must be >= 1");
  DRealization dr;
  switch (zspec.kind) {
    case DistributionKind::kRademacherIid: dr.kind_ = EntryKind::kRademacher; break;
    case DistributionKind::kGaussianIid: dr.kind_ = EntryKind::kGaussian; break;
    default:
      throw ConfigError("DRealization: Z law must be gaussian-iid or rademacher-iid, got " +
                        std::string(to_string(zspec.kind)));
  }
  dr.n_ = n;
  dr.m_ = m;
  dr.words_per_row_ = (m + 63) / 64;
  dr.seed_ = rng.seed();
  dr.stream_id_ = rng.stream_id();
  if (storage == DStorage::kAuto) {
    storage = static_cast<std::int64_t>(n) * m <= kMaterializeLimit ? DStorage::kMaterialized
                                                                    : DStorage::kRegenerated;
  }
  dr.materialized_ = false;
  if (storage == DStorage::kMaterialized) {
    if (dr.kind_ == EntryKind::kRademacher) {
      dr.signs_.resize(static_cast<std::size_t>(n) * dr.words_per_row_);
      parallel_for(n, [&](std::ptrdiff_t i) {
        dr.sign_row(static_cast<int>(i), dr.signs_.data() + i * dr.words_per_row_);
      });
    } else {
      dr.values_.resize(n, m);
      parallel_for(n, [&](std::ptrdiff_t i) { dr.gaussian_row(static_cast<int>(i), dr.values_.row(i).data()); });
    }
    dr.materialized_ = true;
  }
  return dr;
}

DRealization DRealization::from_dense(Matrix entries) {
  if (entries.rows() < 1 || entries.cols() < 1) throw ConfigError("DRealization: empty matrix");
  DRealization dr;
  dr.kind_ = EntryKind::kDense;
  dr.n_ = static_cast<int>(entries.rows());
  dr.m_ = static_cast<int>(entries.cols());
  dr.materialized_ = true;
  dr.values_ = entries;
  return dr;
}

DRealization DRealization::from_sign_bits(int n, int m, const std::vector<std::uint8_t>& bits) {
  const std::size_t total = static_cast<std::size_t>(n) * static_cast<std::size_t>(m);
  if (n < 1 || m < 1 || bits.size() != (total + 7) / 8) throw ConfigError("from_sign_bits: size mismatch");
  DRealization dr;
  dr.kind_ = EntryKind::kRademacher;
  dr.n_ = n;
  dr.m_ = m;
  dr.words_per_row_ = (m + 63) / 64;
  dr.materialized_ = true;
  dr.signs_.assign(static_cast<std::size_t>(n) * dr.words_per_row_, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const std::size_t flat = static_cast<std::size_t>(i) * m + j;
      if ((bits[flat / 8] >> (flat % 8)) & 1u) {
        dr.signs_[static_cast<std::size_t>(i) * dr.words_per_row_ + j / 64] |= std::uint64_t{1} << (j % 64);
      }
    }
  }
  return dr;
}

std::uint64_t DRealization::row_stream(int i) const {
  return RngStream(seed_, stream_id_).substream(static_cast<std::uint64_t>(i)).stream_id();
}

void DRealization::sign_row(int i, std::uint64_t* words) const {
  if (materialized_) {
    std::memcpy(words, signs_.data() + static_cast<std::size_t>(i) * words_per_row_,
                sizeof(std::uint64_t) * words_per_row_);
    return;
  }
  const std::uint64_t stream = row_stream(i);
  for (int w = 0; w < words_per_row_; w += 2) {
    const auto blk = RngStream::block(seed_, stream, static_cast<std::uint64_t>(w / 2));
    words[w] = blk[0];
    if (w + 1 < words_per_row_) words[w + 1] = blk[1];
  }
}

void DRealization::gaussian_row(int i, double* out) const {
  if (materialized_ && values_.size() > 0) {
    std::memcpy(out, values_.row(i).data(), sizeof(double) * m_);
    return;
  }
  const std::uint64_t stream = row_stream(i);
  for (int j = 0; j < m_; j += 2) {
    const auto blk = RngStream::block(seed_, stream, static_cast<std::uint64_t>(j / 2));
    const auto [g0, g1] = box_muller(blk[0], blk[1]);
    out[j] = g0;
    if (j + 1 < m_) out[j + 1] = g1;
  }
}

double DRealization::entry(int i, int j) const {
  if (i < 0 || i >= n_ || j < 0 || j >= m_) throw ConfigError("DRealization::entry: index out of range");
  switch (kind_) {
    case EntryKind::kRademacher: {
      std::uint64_t word;
      if (materialized_) {
        word = signs_[static_cast<std::size_t>(i) * words_per_row_ + j / 64];
      } else {
        word = RngStream::block(seed_, row_stream(i), static_cast<std::uint64_t>(j / 128))[(j / 64) % 2];
      }
      return ((word >> (j % 64)) & 1u) ? 1.0 : -1.0;
    }
    case EntryKind::kGaussian: {
      if (materialized_) return values_(i, j);
      const auto blk = RngStream::block(seed_, row_stream(i), static_cast<std::uint64_t>(j / 2));
      const auto [g0, g1] = box_muller(blk[0], blk[1]);
      return (j % 2 == 0) ? g0 : g1;
    }
    case EntryKind::kDense: return values_(i, j);
  }
  return 0.0;
}

Vector DRealization::column(int j) const {
  if (j < 0 || j >= m_) throw ConfigError("DRealization::column: index out of range");
  Vector out(n_);
  for (int i = 0; i < n_; ++i) out[i] = entry(i, j);
  return out;
}

Matrix DRealization::dense() const {
  Matrix out(n_, m_);
  if (kind_ == EntryKind::kRademacher) {
    std::vector<std::uint64_t> words(static_cast<std::size_t>(words_per_row_));
    for (int i = 0; i < n_; ++i) {
      sign_row(i, words.data());
      for (int j = 0; j < m_; ++j) out(i, j) = ((words[j / 64] >> (j % 64)) & 1u) ? 1.0 : -1.0;
    }
    return out;
  }
  std::vector<double> row(static_cast<std::size_t>(m_));
  for (int i = 0; i < n_; ++i) {
    gaussian_row(i, row.data());
    for (int j = 0; j < m_; ++j) out(i, j) = row[static_cast<std::size_t>(j)];
  }
  return out;
}

Vector DRealization::apply(const Eigen::Ref<const Vector>& y) const {
  if (y.size() != m_) throw ConfigError("apply_D: dimension mismatch");
  Matrix out = apply_columns(Eigen::Ref<const Matrix>(y));
  return out.col(0);
}

Matrix DRealization::apply_columns(const Eigen::Ref<const Matrix>& ys) const {
  if (ys.rows() != m_) throw ConfigError("apply_D: dimension mismatch");
  const Eigen::Index k = ys.cols();
  Matrix out(n_, k);
  if (k == 0) return out;

  if (kind_ == EntryKind::kRademacher) {
    // Signed partial sums for every 4-bit sign pattern of each group of
    // four columns; a row then costs one lookup per nibble.
    const int groups = (m_ + 3) / 4;
    std::vector<double> table(static_cast<std::size_t>(groups) * 16 * k);
    for (int g = 0; g < groups; ++g) {
      for (int pattern = 0; pattern < 16; ++pattern) {
        double* t = table.data() + (static_cast<std::size_t>(g) * 16 + pattern) * k;
        for (Eigen::Index c = 0; c < k; ++c) {
          double acc = 0.0;
          for (int b = 0; b < 4; ++b) {
            const int j = 4 * g + b;
            if (j >= m_) break;
            const double v = ys(j, c);
            acc += ((pattern >> b) & 1) ? v : -v;
          }
          t[c] = acc;
        }
      }
    }
    parallel_for(n_, [&](std::ptrdiff_t i) {
      std::vector<std::uint64_t> words(static_cast<std::size_t>(words_per_row_));
      sign_row(static_cast<int>(i), words.data());
      std::vector<double> acc(static_cast<std::size_t>(k), 0.0);
      for (int g = 0; g < groups; ++g) {
        const unsigned nib = static_cast<unsigned>(words[static_cast<std::size_t>(g / 16)] >> (4 * (g % 16))) & 0xFu;
        const double* t = table.data() + (static_cast<std::size_t>(g) * 16 + nib) * k;
        for (Eigen::Index c = 0; c < k; ++c) acc[static_cast<std::size_t>(c)] += t[c];
      }
      for (Eigen::Index c = 0; c < k; ++c) out(i, c) = acc[static_cast<std::size_t>(c)];
    });
    return out;
  }

  const RowMatrix yr = ys;  // row j contiguous
  parallel_for(n_, [&](std::ptrdiff_t i) {
    std::vector<double> row(static_cast<std::size_t>(m_));
    if (kind_ == EntryKind::kDense) {
      for (int j = 0; j < m_; ++j) row[static_cast<std::size_t>(j)] = values_(i, j);
    } else {
      gaussian_row(static_cast<int>(i), row.data());
    }
    std::vector<double> acc(static_cast<std::size_t>(k), 0.0);
    for (int j = 0; j < m_; ++j) {
      const double z = row[static_cast<std::size_t>(j)];
      const double* yj = yr.row(j).data();
      for (Eigen::Index c = 0; c < k; ++c) acc[static_cast<std::size_t>(c)] += z * yj[c];
    }
    for (Eigen::Index c = 0; c < k; ++c) out(i, c) = acc[static_cast<std::size_t>(c)];
  });
  return out;
}

std::vector<std::uint8_t> DRealization::sign_bits() const {
  if (kind_ != EntryKind::kRademacher) throw ConfigError("sign_bits: D is not a sign matrix");
  const std::size_t total = static_cast<std::size_t>(n_) * static_cast<std::size_t>(m_);
  std::vector<std::uint8_t> bits((total + 7) / 8, 0);
  std::vector<std::uint64_t> words(static_cast<std::size_t>(words_per_row_));
  for (int i = 0; i < n_; ++i) {
    sign_row(i, words.data());
    for (int j = 0; j < m_; ++j) {
      if ((words[static_cast<std::size_t>(j / 64)] >> (j % 64)) & 1u) {
        const std::size_t flat = static_cast<std::size_t>(i) * m_ + j;
        bits[flat / 8] |= static_cast<std::uint8_t>(1u << (flat % 8));
      }
    }
  }
  return bits;
}

Vector apply_D(const DRealization& dr, const Eigen::Ref<const Vector>& y) { return dr.apply(y); }

double psi(const GammaRealization& g, const DRealization& dr, const NormSpace& space,
           const Eigen::Ref<const Vector>& u) {
  if (g.m() != dr.m() || space.n() != dr.n() || u.size() != g.d()) throw ConfigError("psi: dimension mismatch");
  if (std::abs(u.norm() - 1.0) > 1e-9) throw ConfigError("psi: direction is not a unit vector");
  return space(dr.apply(apply_gamma(g, u)));
}

Matrix composite(const GammaRealization& g, const DRealization& dr) {
  if (g.m() != dr.m()) throw ConfigError("composite: dimension mismatch");
  const Matrix scaled = g.rows / std::sqrt(static_cast<double>(g.m()));
  return dr.apply_columns(Eigen::Ref<const Matrix>(scaled));
}

RhoReport rho(const GammaRealization& g) {
  if (!g.rows.allFinite()) throw NumericalError(NumericalFailure::kNonFinite, "rho: non-finite rows");
  const Matrix gram = (g.rows.transpose() * g.rows) / static_cast<double>(g.m());
  const auto eig = jacobi_eigen(gram, 1e-12);
  RhoReport r;
  r.lambda_min_sq = std::max(eig.eigenvalues[0], 0.0);
  r.lambda_max_sq = std::max(eig.eigenvalues[eig.eigenvalues.size() - 1], 0.0);
  r.rho = std::max(std::abs(r.lambda_max_sq - 1.0), std::abs(r.lambda_min_sq - 1.0));
  return r;
}

// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[5] = {'D', 'M', 'E', 'N', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
  char bytes[8];
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((v >> (8 * b)) & 0xFFu);
  os.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char bytes[8];
  is.read(reinterpret_cast<char*>(bytes), 8);
  if (!is) throw ConfigError("read_realization: truncated file");
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  return v;
}

}  // namespace

void write_realization(const std::string& path, const GammaRealization& g, const DRealization& dr,
                       std::uint64_t seed) {
  if (g.m() != dr.m()) throw ConfigError("write_realization: dimension mismatch");
  const auto bits = dr.sign_bits();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("write_realization: cannot open " + path);
  os.write(kMagic, sizeof kMagic);
  put_u64(os, static_cast<std::uint64_t>(dr.n()));
  put_u64(os, static_cast<std::uint64_t>(dr.m()));
  put_u64(os, static_cast<std::uint64_t>(g.d()));
  put_u64(os, seed);
  for (Eigen::Index i = 0; i < g.rows.rows(); ++i)
    for (Eigen::Index c = 0; c < g.rows.cols(); ++c) put_u64(os, std::bit_cast<std::uint64_t>(g.rows(i, c)));
  os.write(reinterpret_cast<const char*>(bits.data()), static_cast<std::streamsize>(bits.size()));
  if (!os) throw ConfigError("write_realization: write failed for " + path);
}

StoredRealization read_realization(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("read_realization: cannot open " + path);
  char magic[5];
  is.read(magic, 5);
  if (!is || std::memcmp(magic, kMagic, 5) != 0) throw ConfigError("read_realization: bad magic");
  const auto n = get_u64(is);
  const auto m = get_u64(is);
  const auto d = get_u64(is);
  const auto seed = get_u64(is);
  if (n == 0 || m == 0 || d == 0 || d > m || n * m > (std::uint64_t{1} << 40)) {
    throw ConfigError("read_realization: implausible header");
  }
  RowMatrix rows(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    for (Eigen::Index c = 0; c < rows.cols(); ++c) rows(i, c) = std::bit_cast<double>(get_u64(is));
  std::vector<std::uint8_t> bits((n * m + 7) / 8);
  is.read(reinterpret_cast<char*>(bits.data()), static_cast<std::streamsize>(bits.size()));
  if (!is) throw ConfigError("read_realization: truncated sign block");
  GammaRealization g = gamma_from_rows(std::move(rows));
  g.seed = seed;
  return StoredRealization{std::move(g),
                           DRealization::from_sign_bits(static_cast<int>(n), static_cast<int>(m), bits), seed};
}

}  // namespace dmlab
