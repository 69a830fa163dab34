// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#ifndef TDDNET_RNG_HPP
#define TDDNET_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>

namespace tddnet {

/// What a random stream is used for.  Part of the seed derivation so that
/// e.g. channel taps and thermal noise never share a stream.
enum class StreamPurpose : std::uint64_t {
  channel = 1,
  rf_chain = 2,
  noise = 3,
  pilot = 4,
  weight_init = 5,
  shuffle = 6,
};

/// Which data split a stream belongs to.  Train/val/test draws come from
/// disjoint streams regardless of how many samples each split requests.
enum class StreamDomain : std::uint64_t {
  train = 1,
  test = 2,
  validation = 3,
  none = 4,
};

/// One step of the splitmix64 generator (Steele et al., "Fast splittable
/// pseudorandom number generators").  Used only to derive seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives a child seed from a master seed and a stream coordinate.  The
/// derivation is a fixed chain of splitmix64 absorb/squeeze steps, so any
/// two distinct coordinates yield independent-looking seeds and the mapping
/// is stable across platforms and releases.
std::uint64_t derive_seed(std::uint64_t master, StreamPurpose purpose,
                          StreamDomain domain, std::uint64_t link_id,
                          std::uint64_t index);

/// A deterministic random stream: mt19937_64 driven by a derived seed, with
/// hand-rolled uniform and Box-Muller transforms so that the produced
/// doubles are identical on every platform (std::normal_distribution is
/// implementation-defined).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  RandomStream(std::uint64_t master, StreamPurpose purpose, StreamDomain domain,
               std::uint64_t link_id, std::uint64_t index)
      : RandomStream(derive_seed(master, purpose, domain, link_id, index)) {}

  std::uint64_t seed() const { return seed_; }

  /// Uniform in [0, 1).
  double uniform();

  /// Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n);

  /// Standard real normal, Box-Muller on two uniform draws.
  double normal();

  /// Circularly-symmetric complex normal with E|z|^2 = 1.
  std::complex<double> complex_normal();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace tddnet

#endif  // TDDNET_RNG_HPP
