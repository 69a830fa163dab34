// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#include "tddnet/rng.hpp"

#include <cmath>
#include <numbers>

namespace tddnet {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, StreamPurpose purpose,
                          StreamDomain domain, std::uint64_t link_id,
                          std::uint64_t index) {
  // Absorb each coordinate between squeeze steps; the chain is injective
  // enough for our coordinate ranges and cheap to recompute anywhere.
  std::uint64_t s = master;
  s = splitmix64(s) ^ static_cast<std::uint64_t>(purpose);
  s = splitmix64(s) ^ static_cast<std::uint64_t>(domain);
  s = splitmix64(s) ^ link_id;
  s = splitmix64(s) ^ index;
  return splitmix64(s);
}

double RandomStream::uniform() {
  // 53 random bits into the mantissa: uniform on [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::uniform_int(std::uint64_t n) {
  // Rejection sampling to avoid modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

double RandomStream::normal() {
  // Box-Muller; only the cosine branch is kept so each call consumes a
  // fixed number of engine draws.
  const double u1 = 1.0 - uniform();  // (0, 1]: keeps the log finite
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::complex<double> RandomStream::complex_normal() {
  // Both Box-Muller branches, scaled so E|z|^2 = 1.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace tddnet

