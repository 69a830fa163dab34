// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#ifndef TDDNET_CHANMODEL_HPP
#define TDDNET_CHANMODEL_HPP

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "tddnet/rng.hpp"

namespace tddnet {

/// TR 38.901 link-level channel classes (Tables 7.7.2-1 .. 7.7.2-5).
enum class ChannelClass : int {
  TDL_A = 0,
  TDL_B = 1,
  TDL_C = 2,
  TDL_D = 3,
  TDL_E = 4,
};

inline constexpr int kNumChannelClasses = 5;
inline constexpr std::array<ChannelClass, kNumChannelClasses> kChannelClasses =
    {ChannelClass::TDL_A, ChannelClass::TDL_B, ChannelClass::TDL_C,
     ChannelClass::TDL_D, ChannelClass::TDL_E};

std::string to_string(ChannelClass cls);
ChannelClass channel_class_from_string(const std::string& name);

/// One row of the shipped TDL table, exactly as transcribed from the
/// standard (file order, delays normalized to unit RMS delay spread).
struct PdpRecord {
  ChannelClass cls;
  int tap_index;
  double normalized_delay;
  double power_db;
  std::optional<double> k_db;
};

/// Parses a TDL data file (`class,tap_index,normalized_delay,power_db[,k_db]`
/// records, `#` comments).  Throws std::runtime_error on malformed input.
std::vector<PdpRecord> parse_pdp_table(const std::string& path);

/// The shipped TR 38.901 table, loaded once and cached.
const std::vector<PdpRecord>& pdp_table();

/// Path of the data file backing pdp_table().
std::string default_pdp_path();

/// Power delay profile scaled to physical delays.  Taps are sorted by delay
/// and coincident taps merged (sum of linear powers), so delays are strictly
/// ascending; powers are renormalized to sum to 1.
struct PowerDelayProfile {
  ChannelClass cls;
  std::vector<double> delays_s;          // strictly ascending, >= 0
  std::vector<double> powers;            // linear fractions, sum == 1
  std::optional<double> los_k_db;        // Ricean K of tap 0 (TDL-D/E)

  std::size_t num_taps() const { return delays_s.size(); }
};

PowerDelayProfile load_pdp(ChannelClass cls, double delay_spread_s);
PowerDelayProfile load_pdp(ChannelClass cls, double delay_spread_s,
                           const std::string& table_path);

/// Doppler parameters of a moving terminal.
struct DopplerSpec {
  double ue_speed_mps = 0.0;
  double carrier_hz = 0.0;
  double f_d_hz = 0.0;  // ue_speed_mps * carrier_hz / c
};

DopplerSpec make_doppler(double ue_speed_mps, double carrier_hz);

/// One small-scale fading state.  The LOS ray (TDL-D/E tap 0) and the
/// diffuse Rayleigh part are kept separate because they evolve differently;
/// tap(i) returns their sum.  diffuse_var holds the stationary variance of
/// each diffuse component so evolution preserves the marginal statistics.
struct ChannelRealization {
  std::vector<std::complex<double>> diffuse;
  std::vector<std::complex<double>> los;
  std::vector<double> diffuse_var;
  double beta = 1.0;   // large-scale fading (linear power)
  double time_s = 0.0;

  std::size_t num_taps() const { return diffuse.size(); }
  std::complex<double> tap(std::size_t i) const { return diffuse[i] + los[i]; }
};

/// Draws a fresh stationary realization at time_s = 0: tap i has total power
/// beta * p_i, split between a deterministic LOS ray and a CN diffuse part
/// according to the PDP's K-factor (diffuse-only when no K is present).
ChannelRealization realize_channel(const PowerDelayProfile& pdp, double beta,
                                   RandomStream& rng);

/// Advances the fading by dt seconds.  Diffuse taps follow a first-order
/// Gauss-Markov recursion with Jakes correlation rho = J0(2 pi f_d dt); the
/// LOS ray rotates deterministically at the TR 38.901 Sec 7.7.3 LOS Doppler
/// of 0.7 f_d.  Marginal tap variances are preserved exactly.
ChannelRealization evolve_channel(const ChannelRealization& ch, double dt_s,
                                  const DopplerSpec& dop, RandomStream& rng);

using FrequencyResponse = Eigen::VectorXcd;

/// Evaluates H(n) = sum_i tap_i * exp(-j 2 pi n scs tau_i) for
/// n = 0..n_subcarriers-1.  Analytic in the tap delays: no grid quantization.
FrequencyResponse freq_response(const ChannelRealization& ch,
                                const PowerDelayProfile& pdp,
                                int n_subcarriers, double scs_hz);

/// Frequency-domain correlation r(delta) = E[H(n+delta) H*(n)] / beta of a
/// stationary realization: the Fourier transform of the PDP,
/// sum_i p_i exp(-j 2 pi delta scs tau_i).
std::complex<double> freq_correlation(const PowerDelayProfile& pdp,
                                      double delta_subcarriers, double scs_hz);

}  // namespace tddnet

#endif  // TDDNET_CHANMODEL_HPP
