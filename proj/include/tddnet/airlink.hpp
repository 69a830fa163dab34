// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#ifndef TDDNET_AIRLINK_HPP
#define TDDNET_AIRLINK_HPP

#include <vector>

#include "tddnet/chanmodel.hpp"
#include "tddnet/rng.hpp"

namespace tddnet {

/// Comb pilot positions: every `spacing`-th subcarrier starting at 0.
struct PilotGrid {
  int n_subcarriers = 0;
  int spacing = 0;
  std::vector<int> indices;  // {0, spacing, 2*spacing, ...} below N

  int num_pilots() const { return static_cast<int>(indices.size()); }
};

PilotGrid make_pilot_grid(int n_subcarriers, int spacing);

/// Known unit-modulus pilot symbols for one sounding block.
struct PilotBlock {
  std::vector<std::complex<double>> symbols;  // QPSK, |x| == 1
  std::uint64_t seed = 0;
};

PilotBlock gen_pilot_symbols(const PilotGrid& grid, RandomStream& rng);

/// LS channel estimates at the pilot subcarriers of one block.
struct PilotCsi {
  std::vector<std::complex<double>> values;
  double snr_db = 0.0;
};

/// Sentinel for noiseless reception (the --no-noise evaluation mode).
inline constexpr double kNoNoiseSnrDb =
    std::numeric_limits<double>::infinity();

/// Receives the pilot block through channel h: y(l) = h(l) x(l) + w(l).
/// The noise variance is set per block, sigma_w^2 = P_rx * 10^(-snr/10)
/// with P_rx the empirical mean of |h(l) x(l)|^2 over this block's pilots,
/// so the requested SNR holds regardless of channel class or RF gains.
/// snr_db = +infinity switches the noise off exactly.
std::vector<std::complex<double>> simulate_pilot_rx(const FrequencyResponse& h,
                                                    const PilotBlock& block,
                                                    const PilotGrid& grid,
                                                    double snr_db,
                                                    RandomStream& rng);

/// Least-squares estimation at the pilots: h_est(l) = y(l) / x(l).
PilotCsi ls_estimate(const std::vector<std::complex<double>>& y,
                     const PilotBlock& block, double snr_db);

/// Flattens L complex values into 2L reals, layout
/// [Re(v_0..v_{L-1}) || Im(v_0..v_{L-1})].  Trained models depend on this
/// exact layout; its id in dataset headers is kFlattenLayoutId.
Eigen::VectorXd flatten_csi(const std::vector<std::complex<double>>& values);
Eigen::VectorXd flatten_csi(const FrequencyResponse& values);

/// Exact inverse of flatten_csi.
std::vector<std::complex<double>> unflatten_csi(const Eigen::VectorXd& flat);

inline constexpr int kFlattenLayoutId = 0;  // real block then imag block

}  // namespace tddnet

#endif  // TDDNET_AIRLINK_HPP
