// Copyright (c) 2026 The elaspoof authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace elaspoof {

/// Purpose-keyed random streams. Every stochastic step in the toolkit draws
/// from its own stream derived from (master seed, stream id), so changing how
/// one purpose consumes randomness never perturbs the others.
enum class RngStream : std::uint64_t {
  kWeightInit = 1,
  kDropout = 2,
  kShuffle = 3,
  kSplit = 4,
  kGradCheck = 5,
  kSynthetic = 6,
};

/// Seedable 64-bit generator with fully specified output mappings.
///
/// The engine (std::mt19937_64) and every conversion below are defined
/// bit-for-bit by this header, not delegated to implementation-defined
/// <random> distributions, so identical seeds give identical sequences on
/// every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Stream constructor: mixes the master seed with the stream id (SplitMix64
  /// finalizer) so streams are statistically independent.
  static Rng for_stream(std::uint64_t master_seed, RngStream stream) {
    return Rng(mix(master_seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(stream))));
  }

  /// Sub-stream keyed by an extra index (e.g. per-sample or per-epoch).
  static Rng for_stream(std::uint64_t master_seed, RngStream stream, std::uint64_t index) {
    return Rng(mix(mix(master_seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(stream))) ^
                   index));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double next_double(double lo, double hi) { return lo + next_double() * (hi - lo); }

  /// Unbiased uniform integer in [0, bound). Lemire multiply-shift with
  /// rejection. bound must be nonzero.
  std::uint64_t next_below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (lo < threshold) {
        m = static_cast<unsigned __int128>(engine_()) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Fisher-Yates shuffle with draws from this stream.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace elaspoof
