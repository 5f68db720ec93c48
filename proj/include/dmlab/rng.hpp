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

#include <array>
#include <cstdint>
#include <limits>
#include <utility>

namespace dmlab {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Maps a 128-bit counter and a 64-bit key to 128
/// pseudorandom bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer; used to derive keys and substream ids.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Counter-based random stream addressed by (seed, stream_id, counter).
///
/// Every 64-bit output is a pure function of the triple, so two streams
/// with equal (seed, stream_id) produce the same sequence no matter how
/// draws from other streams are interleaved or which worker owns them.
/// Satisfies UniformRandomBitGenerator so it can drive <random>
/// distributions.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream() = default;
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t counter() const noexcept { return counter_; }

  /// Independent child stream. Deterministic in (stream_id, index).
  RngStream substream(std::uint64_t index) const {
    return RngStream(seed_, mix64(stream_id_ * 0x9e3779b97f4a7c15ull + mix64(index + 1)));
  }

  /// Random access: the two 64-bit words at block `block` of a stream.
  static std::array<std::uint64_t, 2> block(std::uint64_t seed, std::uint64_t stream_id,
                                            std::uint64_t block);

  std::uint64_t next_u64();

  std::uint64_t operator()() { return next_u64(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open_zero() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  /// Standard normal. Box-Muller on consecutive draws, second value cached.
  double gaussian();

  bool operator==(const RngStream&) const = default;

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t counter_ = 0;  // index of the next 64-bit word
  std::array<std::uint64_t, 2> buffer_{};
  std::uint64_t buffered_block_ = std::numeric_limits<std::uint64_t>::max();
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Box-Muller transform of two raw 64-bit words into a standard normal pair.
std::pair<double, double> box_muller(std::uint64_t a, std::uint64_t b);

}  // namespace dmlab
