//
// specgrad - Copyright 2026 the specgrad authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include "specgrad/vector_ops.hpp"

namespace specgrad {

namespace detail {
inline constexpr std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

// splitmix64 (Steele, Lea, Flood / Vigna), used for seeding only.
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Seedable 64-bit generator: xoshiro256++ (Blackman & Vigna) with splitmix64
/// state expansion. Identical seed gives a bit-identical stream; normal() draws
/// two fresh uniforms per call (Box-Muller, no cached spare), so stream
/// consumption is easy to reason about when reproducing instances.
class Rng {
 public:
  static constexpr const char* algorithm = "xoshiro256++ seeded by splitmix64";

  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& s : state_) s = detail::splitmix64(x);
  }

  /// Independent stream for (master seed, stream index) pairs.
  static Rng derive(std::uint64_t master, std::uint64_t stream) {
    return Rng(master ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  /// Uniform on [0,1), 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0,1); never returns an endpoint.
  double open01() { return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Strictly inside (lo,hi).
  double uniform_open(double lo, double hi) { return lo + (hi - lo) * open01(); }

  double normal() {
    const double u1 = open01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::array<std::uint64_t, 4> state_{};
};

/// Unit vector with direction uniform on the sphere (normalized Gaussian).
inline Vector unit_random_vector(Rng& rng, int n) {
  if (n < 1) throw std::invalid_argument("unit_random_vector: n must be >= 1");
  Vector v(static_cast<std::size_t>(n));
  double nrm = 0.0;
  do {
    for (auto& e : v) e = rng.normal();
    nrm = norm2(v);
  } while (nrm == 0.0);
  scale_inplace(v, 1.0 / nrm);
  return v;
}

}  // namespace specgrad
