// Copyright (c) 2026 nosig authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>

namespace nosig {

/// Default seed used by the CLI when --seed is not given.
inline constexpr std::uint64_t kDefaultSeed = 12345;

// Stream tags for deriving independent generators from one user seed.
// Each consumer mixes (seed, tag, indices...) so results do not depend on
// evaluation order or thread scheduling.
inline constexpr std::uint64_t kStreamSample = 0x5a;
inline constexpr std::uint64_t kStreamPerturb = 0x7e;
inline constexpr std::uint64_t kStreamTrial = 0x91;
inline constexpr std::uint64_t kStreamDensity = 0xd3;
inline constexpr std::uint64_t kStreamOpenness = 0x0b;

// splitmix64 finalizer; good enough to decorrelate nearby seeds.
inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a + 0x9e3779b97f4a7c15ULL * (b + 0x632be59bd9b4e019ULL);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t s1 = 0,
                                std::uint64_t s2 = 0, std::uint64_t s3 = 0) {
  return std::mt19937_64(mix64(mix64(mix64(seed, s1), s2), s3));
}

// Distribution helpers are hand-rolled (not std::*_distribution) so that the
// streams of values are identical across standard libraries.

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Exp(1) draw; finite and >= 0.
inline double exp1(std::mt19937_64& g) { return -std::log1p(-uniform01(g)); }

/// Standard normal via Box-Muller.
inline double normal01(std::mt19937_64& g) {
  double u1 = 1.0 - uniform01(g);  // (0, 1]
  double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Fill `out` with one draw from the flat Dirichlet (uniform on the simplex).
inline void dirichlet_uniform(std::mt19937_64& g, std::span<double> out) {
  double sum = 0.0;
  for (double& v : out) {
    v = exp1(g);
    sum += v;
  }
  if (sum <= 0.0) {  // all draws exactly zero; vanishing probability
    out[0] = 1.0;
    sum = 1.0;
  }
  for (double& v : out) v /= sum;
}

}  // namespace nosig
