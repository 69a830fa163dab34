// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <utility>

#include "doctest.h"
#include "tddnet/airlink.hpp"
#include "testutil.hpp"

using namespace tddnet;

namespace {

FrequencyResponse random_channel(int n, std::uint64_t seed) {
  RandomStream rng(seed);
  FrequencyResponse h(n);
  for (int i = 0; i < n; ++i) h(i) = rng.complex_normal();
  return h;
}

}  // namespace

TEST_CASE("pilot grid layout") {
  const PilotGrid g = make_pilot_grid(256, 24);
  REQUIRE(g.num_pilots() == 11);
  for (int i = 0; i < g.num_pilots(); ++i) CHECK(g.indices[i] == 24 * i);
  CHECK(g.indices.back() == 240);

  const PilotGrid full = make_pilot_grid(256, 1);
  CHECK(full.num_pilots() == 256);
  CHECK(full.indices.front() == 0);
  CHECK(full.indices.back() == 255);

  const PilotGrid single = make_pilot_grid(256, 256);
  REQUIRE(single.num_pilots() == 1);
  CHECK(single.indices[0] == 0);

  // count == ceil(N / spacing) across a spread of shapes
  for (int n : {17, 64, 255, 256}) {
    for (int s : {1, 2, 7, 24, n}) {
      if (s > n) continue;
      const PilotGrid grid = make_pilot_grid(n, s);
      CHECK(grid.num_pilots() == (n + s - 1) / s);
    }
  }

  CHECK_THROWS(make_pilot_grid(256, 0));
  CHECK_THROWS(make_pilot_grid(256, 257));
  CHECK_THROWS(make_pilot_grid(0, 1));
}

TEST_CASE("pilot symbols are QPSK, unit modulus, reproducible") {
  const PilotGrid g = make_pilot_grid(256, 24);
  RandomStream r1(5), r2(5);
  const PilotBlock a = gen_pilot_symbols(g, r1);
  const PilotBlock b = gen_pilot_symbols(g, r2);
  REQUIRE(static_cast<int>(a.symbols.size()) == g.num_pilots());

  const double q = std::numbers::sqrt2 / 2.0;
  std::set<std::pair<double, double>> alphabet = {
      {q, q}, {q, -q}, {-q, q}, {-q, -q}};
  for (std::size_t i = 0; i < a.symbols.size(); ++i) {
    CHECK(std::abs(std::abs(a.symbols[i]) - 1.0) < 1e-15);
    CHECK(alphabet.count({a.symbols[i].real(), a.symbols[i].imag()}) == 1);
    CHECK(a.symbols[i] == b.symbols[i]);
  }
}

TEST_CASE("no-noise reception is exact") {
  const PilotGrid g = make_pilot_grid(64, 8);
  const FrequencyResponse h = random_channel(64, 11);
  RandomStream pr(1), nr(2);
  const PilotBlock block = gen_pilot_symbols(g, pr);
  const auto y = simulate_pilot_rx(h, block, g, kNoNoiseSnrDb, nr);
  REQUIRE(static_cast<int>(y.size()) == g.num_pilots());
  for (int l = 0; l < g.num_pilots(); ++l) {
    CHECK(y[l] == h(g.indices[l]) * block.symbols[l]);
  }

  // and LS recovers the channel at the pilots exactly
  const PilotCsi csi = ls_estimate(y, block, kNoNoiseSnrDb);
  for (int l = 0; l < g.num_pilots(); ++l) {
    CHECK(std::abs(csi.values[l] - h(g.indices[l])) < 1e-15);
  }
}

TEST_CASE("ls_estimate closed form") {
  PilotBlock block;
  block.symbols = {{1.0, 1.0}};
  const std::vector<std::complex<double>> y = {{2.0, 2.0}};
  const PilotCsi csi = ls_estimate(y, block, 10.0);
  REQUIRE(csi.values.size() == 1);
  CHECK(std::abs(csi.values[0] - std::complex<double>{2.0, 0.0}) < 1e-15);
  CHECK(csi.snr_db == 10.0);

  PilotBlock bad;
  bad.symbols = {{0.0, 0.0}};
  CHECK_THROWS(ls_estimate(y, bad, 10.0));
  PilotBlock mismatch;
  mismatch.symbols = {{1.0, 0.0}, {1.0, 0.0}};
  CHECK_THROWS(ls_estimate(y, mismatch, 10.0));
}

TEST_CASE("noise calibration hits the requested SNR") {
  // Monte-Carlo over 1e5 pilots: flat channel h = 1, x = 1, snr 0 dB
  // gives E|y - 1|^2 = 1 within 3%; re/im each carry half the variance.
  const int n_sc = 100000;
  const PilotGrid g = make_pilot_grid(n_sc, 1);
  PilotBlock block;
  block.symbols.assign(n_sc, {1.0, 0.0});
  FrequencyResponse h = FrequencyResponse::Constant(n_sc, {1.0, 0.0});

  RandomStream nr(33);
  const auto y = simulate_pilot_rx(h, block, g, 0.0, nr);
  double var = 0.0, var_re = 0.0, var_im = 0.0;
  std::complex<double> cross{0.0, 0.0};
  for (const auto& v : y) {
    const auto w = v - std::complex<double>{1.0, 0.0};
    var += std::norm(w);
    var_re += w.real() * w.real();
    var_im += w.imag() * w.imag();
    cross += w * w;
  }
  CHECK(var / n_sc == doctest::Approx(1.0).epsilon(0.03));
  CHECK(var_re / n_sc == doctest::Approx(0.5).epsilon(0.03));
  CHECK(var_im / n_sc == doctest::Approx(0.5).epsilon(0.03));
  CHECK(std::abs(cross) / n_sc < 0.02);  // re/im uncorrelated
}

TEST_CASE("empirical SNR tracks the request within 0.2 dB") {
  // Random fading channel and QPSK pilots, pooled over many blocks.
  const PilotGrid g = make_pilot_grid(256, 2);
  for (double snr_db : {0.0, 10.0, 22.0}) {
    double sig = 0.0, noise = 0.0;
    RandomStream pr(7), nr(8);
    for (int blk = 0; blk < 800; ++blk) {
      const FrequencyResponse h = random_channel(256, 900 + blk);
      const PilotBlock block = gen_pilot_symbols(g, pr);
      const auto y = simulate_pilot_rx(h, block, g, snr_db, nr);
      for (int l = 0; l < g.num_pilots(); ++l) {
        const auto s = h(g.indices[l]) * block.symbols[l];
        sig += std::norm(s);
        noise += std::norm(y[l] - s);
      }
    }
    const double measured = 10.0 * std::log10(sig / noise);
    CHECK(std::abs(measured - snr_db) < 0.2);
  }
}

TEST_CASE("LS error variance equals the noise variance for unit pilots") {
  const int n_sc = 100000;
  const PilotGrid g = make_pilot_grid(n_sc, 1);
  const FrequencyResponse h = FrequencyResponse::Constant(n_sc, {1.0, 0.0});
  RandomStream pr(3), nr(4);
  const PilotBlock block = gen_pilot_symbols(g, pr);
  const double snr_db = 7.0;
  const auto y = simulate_pilot_rx(h, block, g, snr_db, nr);
  const PilotCsi csi = ls_estimate(y, block, snr_db);
  double err = 0.0;
  for (int l = 0; l < n_sc; ++l) err += std::norm(csi.values[l] - h(l));
  const double sigma2 = std::pow(10.0, -snr_db / 10.0);
  CHECK(err / n_sc == doctest::Approx(sigma2).epsilon(0.03));
}

TEST_CASE("flatten layout and round trip") {
  const std::vector<std::complex<double>> v = {{1.0, 2.0}, {3.0, 4.0}};
  const Eigen::VectorXd flat = flatten_csi(v);
  REQUIRE(flat.size() == 4);
  CHECK(flat(0) == 1.0);
  CHECK(flat(1) == 3.0);
  CHECK(flat(2) == 2.0);
  CHECK(flat(3) == 4.0);

  const auto back = unflatten_csi(flat);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == v[0]);
  CHECK(back[1] == v[1]);

  // length 11 -> 22 (the headline input width)
  std::vector<std::complex<double>> eleven(11, {0.5, -0.5});
  CHECK(flatten_csi(eleven).size() == 22);

  CHECK_THROWS(unflatten_csi(Eigen::VectorXd::Zero(3)));  // odd length
}

TEST_CASE("flatten/unflatten round-trips bitwise for 1000 random vectors") {
  RandomStream rng(606);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_int(32));
    std::vector<std::complex<double>> v(n);
    for (auto& z : v) z = rng.complex_normal() * 1e3;
    const auto back = unflatten_csi(flatten_csi(v));
    REQUIRE(back.size() == v.size());
    for (int i = 0; i < n; ++i) {
      CHECK(back[i].real() == v[i].real());
      CHECK(back[i].imag() == v[i].imag());
    }
  }
}

TEST_CASE("flatten_csi agrees across its two overloads") {
  FrequencyResponse h(3);
  h << std::complex<double>{1, -2}, std::complex<double>{0, 4},
      std::complex<double>{-7, 0.25};
  std::vector<std::complex<double>> v(h.data(), h.data() + h.size());
  CHECK(flatten_csi(h) == flatten_csi(v));
}

TEST_CASE("simulate_pilot_rx rejects NaN SNR") {
  const PilotGrid g = make_pilot_grid(8, 2);
  const FrequencyResponse h = random_channel(8, 1);
  RandomStream pr(1), nr(2);
  const PilotBlock block = gen_pilot_symbols(g, pr);
  CHECK_THROWS(
      simulate_pilot_rx(h, block, g, std::nan(""), nr));
}
