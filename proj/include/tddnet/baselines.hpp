// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#ifndef TDDNET_BASELINES_HPP
#define TDDNET_BASELINES_HPP

#include "tddnet/airlink.hpp"
#include "tddnet/chanmodel.hpp"
#include "tddnet/rffront.hpp"

namespace tddnet {

/// Whether a baseline gets the ground-truth reciprocity correction before
/// interpolating.  `none` is the honest mode (a classical interpolator has
/// no way to learn the RF chains); `oracle` bounds what calibration could
/// buy and needs the link's chain set.
enum class CalibKind { none, oracle };

struct CalibrationMode {
  CalibKind kind = CalibKind::none;
  const RfChainSet* chains = nullptr;  // required when kind == oracle

  static CalibrationMode off() { return {CalibKind::none, nullptr}; }
  static CalibrationMode oracle(const RfChainSet& chains) {
    return {CalibKind::oracle, &chains};
  }
};

/// Multiplies pilot estimates by the true reciprocity factor
/// (r_dl t_dl)/(r_ul t_ul) at the pilot subcarriers, turning uplink
/// effective-channel estimates into downlink ones.
PilotCsi apply_oracle_calibration(const PilotCsi& csi,
                                  const RfChainSet& chains,
                                  const PilotGrid& grid);

/// Piecewise-linear interpolation of the pilot estimates over the full
/// band, real and imaginary parts independently; past the outermost pilots
/// the nearest two pilots are extrapolated linearly.
FrequencyResponse linear_interp(const PilotCsi& csi, const PilotGrid& grid);

/// LMMSE interpolator h_hat = R_hp (R_pp + sigma_w^2 I)^-1 h_p with the
/// channel's true second-order statistics r(delta) = freq_correlation(pdp).
/// The Gram matrix R_pp of a few-tap profile is often numerically rank
/// deficient, so the inverse is evaluated through an eigendecomposition:
/// modes with lambda + sigma_w^2 below 1e-12 of the largest are dropped and
/// the result flagged as regularized.  sigma_w^2 = 10^(-snr_db/10) on the
/// normalized (unit-power) channel scale.
class WienerFilter {
 public:
  WienerFilter(const PowerDelayProfile& pdp, const PilotGrid& grid,
               double snr_db, double scs_hz);

  FrequencyResponse apply(
      const std::vector<std::complex<double>>& pilot_values) const;

  bool regularized() const { return regularized_; }

 private:
  Eigen::MatrixXcd w_;  // N x N_p, precomputed R_hp (R_pp + s I)^+
  bool regularized_ = false;
};

struct WienerResult {
  FrequencyResponse values;
  bool regularized = false;
};

/// One-shot convenience wrapper around WienerFilter (sweeps should build
/// the filter once per (pdp, grid, snr) point and reuse it).  In oracle
/// calibration mode the pilots are corrected before filtering.
WienerResult wiener_interp(const PilotCsi& csi, const PowerDelayProfile& pdp,
                           double snr_db, const PilotGrid& grid, double scs_hz,
                           const CalibrationMode& calib);

}  // namespace tddnet

#endif  // TDDNET_BASELINES_HPP
