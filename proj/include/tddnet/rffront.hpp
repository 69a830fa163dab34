// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#ifndef TDDNET_RFFRONT_HPP
#define TDDNET_RFFRONT_HPP

#include <complex>

#include "tddnet/chanmodel.hpp"
#include "tddnet/rng.hpp"

namespace tddnet {

/// Statistical model of one RF chain: per-subcarrier baseband gains drawn
/// i.i.d. from CN(mean_gain, variance).
struct RfChainConfig {
  std::complex<double> mean_gain{1.0, 0.0};
  double variance = 0.1;
};

/// The four per-subcarrier chain gain vectors of one AP-UE link.  Sampled
/// once per link and then frozen; the uplink and downlink products
/// r_ul*t_ul and r_dl*t_dl differing is exactly the non-reciprocity this
/// project studies.
struct RfChainSet {
  Eigen::VectorXcd t_ul;  // UE transmit
  Eigen::VectorXcd r_ul;  // AP receive
  Eigen::VectorXcd t_dl;  // AP transmit
  Eigen::VectorXcd r_dl;  // UE receive

  Eigen::Index size() const { return t_ul.size(); }
};

/// Minimum allowed chain-gain magnitude; smaller draws are rejected and
/// redrawn so every chain entry stays safely invertible.
inline constexpr double kMinChainMagnitude = 1e-6;

/// Draws the 4*N chain gains of one link.  Deterministic in the stream, so
/// a link's chains are reproducible from its seed coordinates alone.
RfChainSet gen_rf_chains(const RfChainConfig& cfg, int n_subcarriers,
                         RandomStream& rng);

enum class LinkDirection { UL, DL };

/// Composes the physical channel with the chain gains of one direction:
/// UL h(n) = r_ul(n) g(n) t_ul(n), DL h(n) = r_dl(n) g(n) t_dl(n).
FrequencyResponse effective_channel(const FrequencyResponse& g,
                                    const RfChainSet& chains,
                                    LinkDirection direction);

/// Ground-truth reciprocity transformation
///   h_dl(n) = (r_dl(n) t_dl(n)) / (r_ul(n) t_ul(n)) * h_ul(n).
/// Test oracle and baseline "oracle calibration" mode only; the learned
/// pipeline never sees it.
FrequencyResponse oracle_reciprocity(const FrequencyResponse& h_ul,
                                     const RfChainSet& chains);

/// The per-subcarrier factor (r_dl t_dl)/(r_ul t_ul) used above.
Eigen::VectorXcd reciprocity_factor(const RfChainSet& chains);

/// Writes/reads a chain set as little-endian 32-bit floats, interleaved
/// re/im, vectors in order t_ul, r_ul, t_dl, r_dl (the dataset sidecar
/// format).  Size on disk: 4 * N * 2 * 4 bytes, no header.
void save_chains(const RfChainSet& chains, const std::string& path);
RfChainSet load_chains(const std::string& path);

}  // namespace tddnet

#endif  // TDDNET_RFFRONT_HPP
