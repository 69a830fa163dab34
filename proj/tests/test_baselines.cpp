// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "tddnet/baselines.hpp"
#include "testutil.hpp"

using namespace tddnet;

namespace {

constexpr double kScs = 30e3;

PowerDelayProfile single_tap(double delay_s = 0.0) {
  PowerDelayProfile pdp;
  pdp.cls = ChannelClass::TDL_A;
  pdp.delays_s = {delay_s};
  pdp.powers = {1.0};
  return pdp;
}

/// PDP whose taps sit on the DFT grid of an N-subcarrier band with equal
/// powers: freq_correlation is exactly delta(delta mod N), so the pilot
/// Gram matrix at spacing 1 is the identity.
PowerDelayProfile dft_basis_pdp(int n) {
  PowerDelayProfile pdp;
  pdp.cls = ChannelClass::TDL_A;
  for (int k = 0; k < n; ++k) {
    pdp.delays_s.push_back(k / (n * kScs));
    pdp.powers.push_back(1.0 / n);
  }
  return pdp;
}

std::vector<std::complex<double>> random_pilots(int n, RandomStream& rng) {
  std::vector<std::complex<double>> v(n);
  for (auto& z : v) z = rng.complex_normal();
  return v;
}

double nmse_of(const FrequencyResponse& est, const FrequencyResponse& truth) {
  return (est - truth).squaredNorm() / truth.squaredNorm();
}

}  // namespace

TEST_CASE("linear interpolation closed forms") {
  const PilotGrid grid = make_pilot_grid(256, 24);
  REQUIRE(grid.num_pilots() == 11);

  SUBCASE("midpoint of a ramp segment") {
    PilotCsi csi;
    csi.values.assign(11, {0.0, 0.0});
    csi.values[1] = {24.0, 0.0};
    const FrequencyResponse out = linear_interp(csi, grid);
    CHECK(out(12) == std::complex<double>(12.0, 0.0));
    CHECK(out(0) == std::complex<double>(0.0, 0.0));
    CHECK(out(24) == std::complex<double>(24.0, 0.0));
  }

  SUBCASE("constant pilots reproduce the constant everywhere, exactly") {
    const std::complex<double> c{0.3, -1.7};
    PilotCsi csi;
    csi.values.assign(11, c);
    const FrequencyResponse out = linear_interp(csi, grid);
    for (int n = 0; n < 256; ++n) CHECK(out(n) == c);
  }

  SUBCASE("the last segment extrapolates past the outermost pilot") {
    PilotCsi csi;
    csi.values.assign(11, {0.0, 0.0});
    csi.values[10] = {24.0, 0.0};  // pilot 216 -> 0, pilot 240 -> 24
    const FrequencyResponse out = linear_interp(csi, grid);
    CHECK(out(252) == std::complex<double>(36.0, 0.0));
    CHECK(out(255) == std::complex<double>(39.0, 0.0));
  }

  SUBCASE("needs at least two pilots") {
    const PilotGrid one = make_pilot_grid(256, 256);
    PilotCsi csi;
    csi.values.assign(1, {1.0, 0.0});
    CHECK_THROWS(linear_interp(csi, one));
  }

  SUBCASE("pilot count must match the grid") {
    PilotCsi csi;
    csi.values.assign(10, {1.0, 0.0});
    CHECK_THROWS(linear_interp(csi, grid));
  }
}

TEST_CASE("linear interpolation is exact on flat channels") {
  const PowerDelayProfile pdp = single_tap();
  const PilotGrid grid = make_pilot_grid(256, 24);
  RandomStream rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const ChannelRealization ch = realize_channel(pdp, 1.0, rng);
    const FrequencyResponse h = freq_response(ch, pdp, 256, kScs);
    PilotCsi csi;
    for (int idx : grid.indices) csi.values.push_back(h(idx));
    const FrequencyResponse out = linear_interp(csi, grid);
    for (int n = 0; n < 256; ++n) CHECK(out(n) == h(n));
  }
}

TEST_CASE("linear interpolation is linear in the pilot values") {
  const PilotGrid grid = make_pilot_grid(64, 8);
  RandomStream rng(52);
  PilotCsi a, b;
  a.values = random_pilots(grid.num_pilots(), rng);
  b.values = random_pilots(grid.num_pilots(), rng);
  const std::complex<double> ca{1.3, -0.4}, cb{-0.2, 2.1};
  PilotCsi mix;
  for (int l = 0; l < grid.num_pilots(); ++l) {
    mix.values.push_back(ca * a.values[l] + cb * b.values[l]);
  }
  const FrequencyResponse want =
      ca * linear_interp(a, grid) + cb * linear_interp(b, grid);
  const FrequencyResponse got = linear_interp(mix, grid);
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("oracle calibration multiplies by the reciprocity factor") {
  const PilotGrid grid = make_pilot_grid(32, 4);
  RandomStream rng(53);
  const RfChainSet chains = gen_rf_chains(RfChainConfig{}, 32, rng);
  PilotCsi csi;
  csi.values = random_pilots(grid.num_pilots(), rng);
  csi.snr_db = 17.0;

  const PilotCsi out = apply_oracle_calibration(csi, chains, grid);
  const Eigen::VectorXcd factor = reciprocity_factor(chains);
  REQUIRE(out.values.size() == csi.values.size());
  CHECK(out.snr_db == csi.snr_db);
  for (int l = 0; l < grid.num_pilots(); ++l) {
    const std::complex<double> want = csi.values[l] * factor(grid.indices[l]);
    CHECK(std::abs(out.values[l] - want) < 1e-15);
  }

  PilotCsi bad;
  bad.values = random_pilots(3, rng);
  CHECK_THROWS(apply_oracle_calibration(bad, chains, grid));
  RandomStream rng2(54);
  const RfChainSet small = gen_rf_chains(RfChainConfig{}, 16, rng2);
  CHECK_THROWS(apply_oracle_calibration(csi, small, grid));
}

TEST_CASE("Wiener filter: single-pilot single-tap shrinkage") {
  // N = 1, one tap at zero delay: r(.) == 1, so the estimate is the
  // classical scalar LMMSE shrinkage h_p / (1 + sigma_w^2).
  const PilotGrid grid = make_pilot_grid(1, 1);
  const double snr_db = 10.0;
  const double sigma2 = std::pow(10.0, -snr_db / 10.0);
  const WienerFilter filter(single_tap(), grid, snr_db, kScs);
  CHECK_FALSE(filter.regularized());
  const std::complex<double> h_p{0.8, -0.6};
  const FrequencyResponse out = filter.apply({h_p});
  REQUIRE(out.size() == 1);
  CHECK(std::abs(out(0) - h_p / (1.0 + sigma2)) < 1e-12);
}

TEST_CASE("Wiener filter matches the dense LMMSE formula") {
  const PilotGrid grid = make_pilot_grid(256, 24);
  const PowerDelayProfile pdp = load_pdp(ChannelClass::TDL_C, 100e-9);
  const double snr_db = 20.0;
  const double sigma2 = std::pow(10.0, -snr_db / 10.0);

  const int n_p = grid.num_pilots();
  Eigen::MatrixXcd r_pp(n_p, n_p), r_hp(256, n_p);
  for (int i = 0; i < n_p; ++i) {
    for (int j = 0; j < n_p; ++j) {
      r_pp(i, j) =
          freq_correlation(pdp, grid.indices[i] - grid.indices[j], kScs);
    }
  }
  for (int m = 0; m < 256; ++m) {
    for (int j = 0; j < n_p; ++j) {
      r_hp(m, j) = freq_correlation(pdp, m - grid.indices[j], kScs);
    }
  }
  const Eigen::MatrixXcd w_dense =
      r_hp * (r_pp + sigma2 * Eigen::MatrixXcd::Identity(n_p, n_p)).inverse();

  const WienerFilter filter(pdp, grid, snr_db, kScs);
  RandomStream rng(55);
  for (int trial = 0; trial < 5; ++trial) {
    const auto pilots = random_pilots(n_p, rng);
    const Eigen::Map<const Eigen::VectorXcd> p(pilots.data(), n_p);
    const FrequencyResponse want = w_dense * p;
    const FrequencyResponse got = filter.apply(pilots);
    CHECK((got - want).norm() / want.norm() < 1e-9);
  }
}

TEST_CASE("Wiener at spacing 1 with a DFT-basis profile is the identity") {
  // The pilot Gram matrix is exactly I, so even unrealizable inputs pass
  // through unchanged when the noise term is zero.
  const int n = 8;
  const PilotGrid grid = make_pilot_grid(n, 1);
  const WienerFilter filter(dft_basis_pdp(n), grid, kNoNoiseSnrDb, kScs);
  CHECK_FALSE(filter.regularized());
  RandomStream rng(56);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pilots = random_pilots(n, rng);
    const FrequencyResponse out = filter.apply(pilots);
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(out(i) - pilots[i]) < 1e-12);
    }
  }
}

TEST_CASE("Wiener at spacing 1 without noise reconstructs realizations") {
  // The pilot covariance of a 24-tap profile on 64 subcarriers is rank
  // deficient, but any realizable channel lies in the span of the steering
  // vectors, so the truncated pseudoinverse still acts as the identity.
  const PowerDelayProfile pdp = load_pdp(ChannelClass::TDL_C, 100e-9);
  const PilotGrid grid = make_pilot_grid(64, 1);
  const WienerFilter filter(pdp, grid, kNoNoiseSnrDb, kScs);
  CHECK(filter.regularized());

  RandomStream rng(57);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const ChannelRealization ch = realize_channel(pdp, 1.0, rng);
    const FrequencyResponse h = freq_response(ch, pdp, 64, kScs);
    std::vector<std::complex<double>> pilots(h.data(), h.data() + 64);
    worst = std::max(worst, nmse_of(filter.apply(pilots), h));
  }
  CHECK(worst < 1e-6);
  MESSAGE("worst spacing-1 noiseless NMSE: ", worst);
}

TEST_CASE("Wiener reconstructs a single tap at nonzero delay exactly") {
  // Rank-1 pilot covariance; a realizable input c * steering vector maps to
  // the full-band steering vector scaled by c.
  const double tau = 1e-7;
  const PowerDelayProfile pdp = single_tap(tau);
  const PilotGrid grid = make_pilot_grid(64, 8);
  const WienerFilter filter(pdp, grid, kNoNoiseSnrDb, kScs);
  CHECK(filter.regularized());  // 1 active mode of 8

  const std::complex<double> c{1.2, 0.7};
  std::vector<std::complex<double>> pilots;
  for (int idx : grid.indices) {
    pilots.push_back(
        c * std::polar(1.0, -2.0 * std::numbers::pi * idx * kScs * tau));
  }
  const FrequencyResponse out = filter.apply(pilots);
  for (int m = 0; m < 64; ++m) {
    const std::complex<double> want =
        c * std::polar(1.0, -2.0 * std::numbers::pi * m * kScs * tau);
    CHECK(std::abs(out(m) - want) < 1e-9);
  }
}

TEST_CASE("Wiener filter is linear and validates pilot counts") {
  const PowerDelayProfile pdp = load_pdp(ChannelClass::TDL_B, 100e-9);
  const PilotGrid grid = make_pilot_grid(64, 8);
  const WienerFilter filter(pdp, grid, 15.0, kScs);
  RandomStream rng(58);
  const auto a = random_pilots(8, rng);
  const auto b = random_pilots(8, rng);
  const std::complex<double> ca{0.5, 1.5}, cb{-1.0, 0.25};
  std::vector<std::complex<double>> mix(8);
  for (int i = 0; i < 8; ++i) mix[i] = ca * a[i] + cb * b[i];
  const FrequencyResponse want = ca * filter.apply(a) + cb * filter.apply(b);
  const FrequencyResponse got = filter.apply(mix);
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS(filter.apply(random_pilots(7, rng)));
}

TEST_CASE("Wiener NMSE degrades monotonically with pilot spacing") {
  const PowerDelayProfile pdp = load_pdp(ChannelClass::TDL_C, 100e-9);
  const int n = 256;
  const double snr_db = 20.0;
  const std::vector<int> spacings = {8, 16, 24, 32, 48};

  std::vector<PilotGrid> grids;
  std::vector<WienerFilter> filters;
  for (int s : spacings) {
    grids.push_back(make_pilot_grid(n, s));
    filters.emplace_back(pdp, grids.back(), snr_db, kScs);
  }

  RandomStream ch_rng(59), pilot_rng(60), noise_rng(61);
  std::vector<double> num(spacings.size(), 0.0), den(spacings.size(), 0.0);
  const int n_samples = 10000;
  for (int i = 0; i < n_samples; ++i) {
    const ChannelRealization ch = realize_channel(pdp, 1.0, ch_rng);
    const FrequencyResponse h = freq_response(ch, pdp, n, kScs);
    for (std::size_t k = 0; k < spacings.size(); ++k) {
      const PilotBlock block = gen_pilot_symbols(grids[k], pilot_rng);
      const auto y = simulate_pilot_rx(h, block, grids[k], snr_db, noise_rng);
      const PilotCsi csi = ls_estimate(y, block, snr_db);
      const FrequencyResponse est = filters[k].apply(csi.values);
      num[k] += (est - h).squaredNorm();
      den[k] += h.squaredNorm();
    }
  }
  for (std::size_t k = 0; k < spacings.size(); ++k) {
    const double nmse = num[k] / den[k];
    MESSAGE("spacing ", spacings[k], " NMSE ", nmse);
    if (k > 0) CHECK(num[k] / den[k] > num[k - 1] / den[k - 1]);
  }
}

TEST_CASE("wiener_interp wrapper calibrates before filtering") {
  const PowerDelayProfile pdp = load_pdp(ChannelClass::TDL_A, 100e-9);
  const PilotGrid grid = make_pilot_grid(64, 8);
  RandomStream rng(62);
  const RfChainSet chains = gen_rf_chains(RfChainConfig{}, 64, rng);
  PilotCsi csi;
  csi.values = random_pilots(grid.num_pilots(), rng);
  csi.snr_db = 12.0;

  const WienerResult oracle = wiener_interp(csi, pdp, csi.snr_db, grid, kScs,
                                            CalibrationMode::oracle(chains));
  const WienerFilter filter(pdp, grid, csi.snr_db, kScs);
  const FrequencyResponse want =
      filter.apply(apply_oracle_calibration(csi, chains, grid).values);
  CHECK((oracle.values - want).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(oracle.regularized == filter.regularized());

  const WienerResult plain =
      wiener_interp(csi, pdp, csi.snr_db, grid, kScs, CalibrationMode::off());
  CHECK((plain.values - filter.apply(csi.values)).cwiseAbs().maxCoeff() <
        1e-15);

  CalibrationMode broken;
  broken.kind = CalibKind::oracle;
  CHECK_THROWS(wiener_interp(csi, pdp, csi.snr_db, grid, kScs, broken));
}
