// Copyright (c) dpdopt contributors. Apache-2.0 license.

#pragma once

#include <cstdint>
#include <random>

#include "dpd/linalg.hpp"

namespace dpd {

// Deterministic random source. All draws are derived from the mt19937_64
// bit stream (whose sequence is fixed by the C++ standard), never from
// std::*_distribution, so results are identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), unbiased via rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % n;
  }

  Vector uniform_vector(int dim, double lo, double hi) {
    Vector v(dim);
    for (int k = 0; k < dim; ++k) v[k] = uniform(lo, hi);
    return v;
  }

  /// Derives an independent stream (SplitMix64 finalizer over seed and tag).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace dpd
