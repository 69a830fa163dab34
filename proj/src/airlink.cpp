// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#include "tddnet/airlink.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tddnet {

PilotGrid make_pilot_grid(int n_subcarriers, int spacing) {
  if (spacing < 1 || spacing > n_subcarriers) {
    throw std::invalid_argument("pilot spacing must be in [1, N]");
  }
  PilotGrid grid;
  grid.n_subcarriers = n_subcarriers;
  grid.spacing = spacing;
  for (int idx = 0; idx < n_subcarriers; idx += spacing) {
    grid.indices.push_back(idx);
  }
  return grid;
}

PilotBlock gen_pilot_symbols(const PilotGrid& grid, RandomStream& rng) {
  static const std::complex<double> kQpsk[4] = {
      {std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0},
      {-std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0},
      {-std::numbers::sqrt2 / 2.0, -std::numbers::sqrt2 / 2.0},
      {std::numbers::sqrt2 / 2.0, -std::numbers::sqrt2 / 2.0},
  };
  PilotBlock block;
  block.seed = rng.seed();
  block.symbols.reserve(grid.indices.size());
  for (std::size_t i = 0; i < grid.indices.size(); ++i) {
    block.symbols.push_back(kQpsk[rng.uniform_int(4)]);
  }
  return block;
}

std::vector<std::complex<double>> simulate_pilot_rx(const FrequencyResponse& h,
                                                    const PilotBlock& block,
                                                    const PilotGrid& grid,
                                                    double snr_db,
                                                    RandomStream& rng) {
  if (h.size() != grid.n_subcarriers) {
    throw std::invalid_argument("channel length does not match pilot grid");
  }
  if (block.symbols.size() != grid.indices.size()) {
    throw std::invalid_argument("pilot block does not match grid");
  }
  if (std::isnan(snr_db)) throw std::invalid_argument("SNR must not be NaN");

  const std::size_t n_p = grid.indices.size();
  std::vector<std::complex<double>> y(n_p);
  double p_rx = 0.0;
  for (std::size_t l = 0; l < n_p; ++l) {
    y[l] = h(grid.indices[l]) * block.symbols[l];
    p_rx += std::norm(y[l]);
  }
  p_rx /= static_cast<double>(n_p);

  if (snr_db == kNoNoiseSnrDb) return y;

  const double sigma_w = std::sqrt(p_rx * std::pow(10.0, -snr_db / 10.0));
  for (std::size_t l = 0; l < n_p; ++l) {
    y[l] += sigma_w * rng.complex_normal();
  }
  return y;
}

PilotCsi ls_estimate(const std::vector<std::complex<double>>& y,
                     const PilotBlock& block, double snr_db) {
  if (y.size() != block.symbols.size()) {
    throw std::invalid_argument("received vector does not match pilot block");
  }
  PilotCsi csi;
  csi.snr_db = snr_db;
  csi.values.resize(y.size());
  for (std::size_t l = 0; l < y.size(); ++l) {
    if (std::abs(block.symbols[l]) < 1e-12) {
      throw std::domain_error("pilot symbol too small for LS division");
    }
    csi.values[l] = y[l] / block.symbols[l];
  }
  return csi;
}

Eigen::VectorXd flatten_csi(const std::vector<std::complex<double>>& values) {
  const Eigen::Index n = static_cast<Eigen::Index>(values.size());
  Eigen::VectorXd flat(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    flat(i) = values[i].real();
    flat(n + i) = values[i].imag();
  }
  return flat;
}

Eigen::VectorXd flatten_csi(const FrequencyResponse& values) {
  const Eigen::Index n = values.size();
  Eigen::VectorXd flat(2 * n);
  flat.head(n) = values.real();
  flat.tail(n) = values.imag();
  return flat;
}

std::vector<std::complex<double>> unflatten_csi(const Eigen::VectorXd& flat) {
  if (flat.size() % 2 != 0) {
    throw std::invalid_argument("flattened CSI must have even length");
  }
  const Eigen::Index n = flat.size() / 2;
  std::vector<std::complex<double>> values(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    values[i] = {flat(i), flat(n + i)};
  }
  return values;
}

}  // namespace tddnet
