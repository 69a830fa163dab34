// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#include "tddnet/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace tddnet {

PilotCsi apply_oracle_calibration(const PilotCsi& csi,
                                  const RfChainSet& chains,
                                  const PilotGrid& grid) {
  if (static_cast<int>(csi.values.size()) != grid.num_pilots()) {
    throw std::invalid_argument("pilot CSI does not match grid");
  }
  if (chains.size() != grid.n_subcarriers) {
    throw std::invalid_argument("chain set does not match grid");
  }
  const Eigen::VectorXcd factor = reciprocity_factor(chains);
  PilotCsi out = csi;
  for (int l = 0; l < grid.num_pilots(); ++l) {
    out.values[l] *= factor(grid.indices[l]);
  }
  return out;
}

FrequencyResponse linear_interp(const PilotCsi& csi, const PilotGrid& grid) {
  const int n_p = grid.num_pilots();
  if (static_cast<int>(csi.values.size()) != n_p) {
    throw std::invalid_argument("pilot CSI does not match grid");
  }
  if (n_p < 2) {
    throw std::invalid_argument("linear interpolation needs >= 2 pilots");
  }

  FrequencyResponse out(grid.n_subcarriers);
  int seg = 0;  // pilot segment [indices[seg], indices[seg+1])
  for (int n = 0; n < grid.n_subcarriers; ++n) {
    while (seg + 2 < n_p && n >= grid.indices[seg + 1]) ++seg;
    const double x0 = grid.indices[seg];
    const double x1 = grid.indices[seg + 1];
    const double t = (static_cast<double>(n) - x0) / (x1 - x0);
    out(n) = csi.values[seg] + t * (csi.values[seg + 1] - csi.values[seg]);
  }
  return out;
}

WienerFilter::WienerFilter(const PowerDelayProfile& pdp, const PilotGrid& grid,
                           double snr_db, double scs_hz) {
  const int n_p = grid.num_pilots();
  const int n = grid.n_subcarriers;
  if (n_p < 1) throw std::invalid_argument("need at least one pilot");

  const double sigma_w2 =
      snr_db == kNoNoiseSnrDb ? 0.0 : std::pow(10.0, -snr_db / 10.0);

  Eigen::MatrixXcd r_pp(n_p, n_p);
  for (int i = 0; i < n_p; ++i) {
    for (int j = 0; j < n_p; ++j) {
      r_pp(i, j) = freq_correlation(
          pdp, static_cast<double>(grid.indices[i] - grid.indices[j]), scs_hz);
    }
  }
  Eigen::MatrixXcd r_hp(n, n_p);
  for (int m = 0; m < n; ++m) {
    for (int j = 0; j < n_p; ++j) {
      r_hp(m, j) = freq_correlation(
          pdp, static_cast<double>(m - grid.indices[j]), scs_hz);
    }
  }

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r_pp);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("Wiener pilot-covariance eigensolve failed");
  }
  Eigen::VectorXd d = es.eigenvalues().array() + sigma_w2;
  const double cutoff = d.maxCoeff() * 1e-12;
  Eigen::VectorXd inv(n_p);
  for (int k = 0; k < n_p; ++k) {
    if (d(k) > cutoff) {
      inv(k) = 1.0 / d(k);
    } else {
      inv(k) = 0.0;  // numerically null mode of the pilot Gram matrix
      regularized_ = true;
    }
  }
  w_ = r_hp * es.eigenvectors() * inv.asDiagonal() *
       es.eigenvectors().adjoint();
}

FrequencyResponse WienerFilter::apply(
    const std::vector<std::complex<double>>& pilot_values) const {
  if (static_cast<Eigen::Index>(pilot_values.size()) != w_.cols()) {
    throw std::invalid_argument("pilot vector does not match filter");
  }
  const Eigen::Map<const Eigen::VectorXcd> p(pilot_values.data(),
                                             w_.cols());
  return w_ * p;
}

WienerResult wiener_interp(const PilotCsi& csi, const PowerDelayProfile& pdp,
                           double snr_db, const PilotGrid& grid, double scs_hz,
                           const CalibrationMode& calib) {
  if (calib.kind == CalibKind::oracle && calib.chains == nullptr) {
    throw std::invalid_argument("oracle calibration needs a chain set");
  }
  const WienerFilter filter(pdp, grid, snr_db, scs_hz);
  const PilotCsi* input = &csi;
  PilotCsi calibrated;
  if (calib.kind == CalibKind::oracle) {
    calibrated = apply_oracle_calibration(csi, *calib.chains, grid);
    input = &calibrated;
  }
  return {filter.apply(input->values), filter.regularized()};
}

}  // namespace tddnet
