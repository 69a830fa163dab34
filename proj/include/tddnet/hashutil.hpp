// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#ifndef TDDNET_HASHUTIL_HPP
#define TDDNET_HASHUTIL_HPP

#include <cstddef>
#include <cstdint>

namespace tddnet {

inline constexpr std::uint64_t kFnvBasis = 0xcbf29ce484222325ull;

/// FNV-1a 64-bit hash; used for content-addressed sample ordering and
/// config fingerprints (never for anything adversarial).
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t basis = kFnvBasis) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = basis;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace tddnet

#endif  // TDDNET_HASHUTIL_HPP
