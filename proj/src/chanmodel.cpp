// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#include "tddnet/chanmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace tddnet {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string to_string(ChannelClass cls) {
  switch (cls) {
    case ChannelClass::TDL_A: return "TDL_A";
    case ChannelClass::TDL_B: return "TDL_B";
    case ChannelClass::TDL_C: return "TDL_C";
    case ChannelClass::TDL_D: return "TDL_D";
    case ChannelClass::TDL_E: return "TDL_E";
  }
  throw std::invalid_argument("invalid ChannelClass");
}

ChannelClass channel_class_from_string(const std::string& name) {
  std::string key = name;
  std::replace(key.begin(), key.end(), '-', '_');
  for (const ChannelClass cls : kChannelClasses) {
    if (key == to_string(cls)) return cls;
  }
  throw std::invalid_argument("unknown channel class: " + name);
}

std::vector<PdpRecord> parse_pdp_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open PDP table: " + path);

  std::vector<PdpRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;

    std::vector<std::string> fields;
    std::stringstream ss(body);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (fields.size() != 4 && fields.size() != 5) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 4 or 5 fields");
    }

    PdpRecord rec;
    try {
      rec.cls = channel_class_from_string(fields[0]);
      rec.tap_index = std::stoi(fields[1]);
      rec.normalized_delay = std::stod(fields[2]);
      rec.power_db = std::stod(fields[3]);
      if (fields.size() == 5 && !fields[4].empty()) {
        rec.k_db = std::stod(fields[4]);
      }
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": malformed record");
    }
    records.push_back(rec);
  }
  if (records.empty()) {
    throw std::runtime_error("PDP table is empty: " + path);
  }
  return records;
}

std::string default_pdp_path() {
  if (const char* env = std::getenv("TDDNET_PDP_TABLE")) return env;
#ifdef TDDNET_DATA_DIR
  return std::string(TDDNET_DATA_DIR) + "/tdl38901.txt";
#else
  return "data/tdl38901.txt";
#endif
}

const std::vector<PdpRecord>& pdp_table() {
  static const std::vector<PdpRecord> table = parse_pdp_table(default_pdp_path());
  return table;
}

PowerDelayProfile load_pdp(ChannelClass cls, double delay_spread_s) {
  if (!(delay_spread_s > 0.0)) {
    throw std::invalid_argument("delay spread must be positive");
  }
  static std::mutex mu;
  static std::map<ChannelClass, PowerDelayProfile> cache;  // unit delay spread
  {
    std::scoped_lock lock(mu);
    const auto it = cache.find(cls);
    if (it != cache.end()) {
      PowerDelayProfile pdp = it->second;
      for (double& d : pdp.delays_s) d *= delay_spread_s;
      return pdp;
    }
  }
  PowerDelayProfile unit = load_pdp(cls, 1.0, default_pdp_path());
  {
    std::scoped_lock lock(mu);
    cache.emplace(cls, unit);
  }
  for (double& d : unit.delays_s) d *= delay_spread_s;
  return unit;
}

PowerDelayProfile load_pdp(ChannelClass cls, double delay_spread_s,
                           const std::string& table_path) {
  if (!(delay_spread_s > 0.0)) {
    throw std::invalid_argument("delay spread must be positive");
  }
  const std::vector<PdpRecord> table = parse_pdp_table(table_path);

  struct Tap {
    double delay;
    double power;
  };
  std::vector<Tap> taps;
  std::optional<double> k_db;
  bool k_on_first_delay = false;
  for (const PdpRecord& rec : table) {
    if (rec.cls != cls) continue;
    taps.push_back({rec.normalized_delay, std::pow(10.0, rec.power_db / 10.0)});
    if (rec.k_db) {
      k_db = rec.k_db;
      k_on_first_delay = rec.normalized_delay == 0.0;
    }
  }
  if (taps.empty()) {
    throw std::runtime_error("class " + to_string(cls) + " not in PDP table");
  }
  if (k_db && !k_on_first_delay) {
    throw std::runtime_error("K-factor must sit on the delay-0 tap");
  }

  // The standard's tables are not ordered by delay and may repeat a delay;
  // sort and merge so the profile has strictly ascending delays.
  std::stable_sort(taps.begin(), taps.end(),
                   [](const Tap& a, const Tap& b) { return a.delay < b.delay; });
  std::vector<Tap> merged;
  for (const Tap& t : taps) {
    if (!merged.empty() && merged.back().delay == t.delay) {
      merged.back().power += t.power;
    } else {
      merged.push_back(t);
    }
  }

  double total = 0.0;
  for (const Tap& t : merged) total += t.power;

  PowerDelayProfile pdp;
  pdp.cls = cls;
  pdp.los_k_db = k_db;
  pdp.delays_s.reserve(merged.size());
  pdp.powers.reserve(merged.size());
  for (const Tap& t : merged) {
    pdp.delays_s.push_back(t.delay * delay_spread_s);
    pdp.powers.push_back(t.power / total);
  }
  return pdp;
}

DopplerSpec make_doppler(double ue_speed_mps, double carrier_hz) {
  DopplerSpec dop;
  dop.ue_speed_mps = ue_speed_mps;
  dop.carrier_hz = carrier_hz;
  dop.f_d_hz = ue_speed_mps * carrier_hz / kSpeedOfLight;
  return dop;
}

ChannelRealization realize_channel(const PowerDelayProfile& pdp, double beta,
                                   RandomStream& rng) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");

  const std::size_t n = pdp.num_taps();
  ChannelRealization ch;
  ch.beta = beta;
  ch.time_s = 0.0;
  ch.diffuse.resize(n);
  ch.los.assign(n, {0.0, 0.0});
  ch.diffuse_var.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    double diffuse_power = beta * pdp.powers[i];
    if (i == 0 && pdp.los_k_db) {
      // Ricean split of the first tap: K/(K+1) deterministic, 1/(K+1) CN.
      const double k = std::pow(10.0, *pdp.los_k_db / 10.0);
      const double los_power = diffuse_power * k / (k + 1.0);
      diffuse_power /= k + 1.0;
      ch.los[i] = {std::sqrt(los_power), 0.0};
    }
    ch.diffuse_var[i] = diffuse_power;
    ch.diffuse[i] = std::sqrt(diffuse_power) * rng.complex_normal();
  }
  return ch;
}

ChannelRealization evolve_channel(const ChannelRealization& ch, double dt_s,
                                  const DopplerSpec& dop, RandomStream& rng) {
  if (dt_s < 0.0) throw std::invalid_argument("dt must be non-negative");

  // Jakes autocorrelation of the diffuse process at lag dt.
  const double rho =
      std::cyl_bessel_j(0.0, 2.0 * std::numbers::pi * dop.f_d_hz * dt_s);
  const double innov = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  // LOS ray Doppler per TR 38.901 Sec 7.7.3 (k_LOS = 0.7).
  const double los_phase = 2.0 * std::numbers::pi * 0.7 * dop.f_d_hz * dt_s;
  const std::complex<double> los_rot = std::polar(1.0, los_phase);

  ChannelRealization out = ch;
  out.time_s = ch.time_s + dt_s;
  for (std::size_t i = 0; i < ch.num_taps(); ++i) {
    out.diffuse[i] = rho * ch.diffuse[i] +
                     innov * std::sqrt(ch.diffuse_var[i]) * rng.complex_normal();
    out.los[i] = ch.los[i] * los_rot;
  }
  return out;
}

FrequencyResponse freq_response(const ChannelRealization& ch,
                                const PowerDelayProfile& pdp,
                                int n_subcarriers, double scs_hz) {
  if (ch.num_taps() != pdp.num_taps()) {
    throw std::invalid_argument("realization/PDP tap count mismatch");
  }
  if (n_subcarriers < 1 || !(scs_hz > 0.0)) {
    throw std::invalid_argument("invalid OFDM grid");
  }

  const std::size_t n_taps = pdp.num_taps();
  // Per-tap phasor recurrence: H(n) = sum_i tap_i * w_i^n with
  // w_i = exp(-j 2 pi scs tau_i).  Drift over a few hundred steps is far
  // below the tolerances used anywhere in this project.
  std::vector<std::complex<double>> w(n_taps), cur(n_taps);
  for (std::size_t i = 0; i < n_taps; ++i) {
    w[i] = std::polar(1.0, -2.0 * std::numbers::pi * scs_hz * pdp.delays_s[i]);
    cur[i] = ch.tap(i);
  }

  FrequencyResponse h(n_subcarriers);
  for (int n = 0; n < n_subcarriers; ++n) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < n_taps; ++i) {
      acc += cur[i];
      cur[i] *= w[i];
    }
    h(n) = acc;
  }
  return h;
}

std::complex<double> freq_correlation(const PowerDelayProfile& pdp,
                                      double delta_subcarriers, double scs_hz) {
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < pdp.num_taps(); ++i) {
    acc += pdp.powers[i] *
           std::polar(1.0, -2.0 * std::numbers::pi * delta_subcarriers *
                               scs_hz * pdp.delays_s[i]);
  }
  return acc;
}

}  // namespace tddnet
