// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#include "tddnet/rffront.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace tddnet {

namespace {

Eigen::VectorXcd gen_chain_vector(const RfChainConfig& cfg, int n,
                                  RandomStream& rng) {
  Eigen::VectorXcd v(n);
  const double sigma = std::sqrt(cfg.variance);
  for (int i = 0; i < n; ++i) {
    std::complex<double> z;
    do {
      z = cfg.mean_gain + sigma * rng.complex_normal();
    } while (std::abs(z) < kMinChainMagnitude);
    v(i) = z;
  }
  return v;
}

}  // namespace

RfChainSet gen_rf_chains(const RfChainConfig& cfg, int n_subcarriers,
                         RandomStream& rng) {
  if (cfg.variance < 0.0 || std::abs(cfg.mean_gain) <= 0.0) {
    throw std::invalid_argument("invalid RF chain config");
  }
  if (n_subcarriers < 1) {
    throw std::invalid_argument("need at least one subcarrier");
  }
  RfChainSet set;
  set.t_ul = gen_chain_vector(cfg, n_subcarriers, rng);
  set.r_ul = gen_chain_vector(cfg, n_subcarriers, rng);
  set.t_dl = gen_chain_vector(cfg, n_subcarriers, rng);
  set.r_dl = gen_chain_vector(cfg, n_subcarriers, rng);
  return set;
}

FrequencyResponse effective_channel(const FrequencyResponse& g,
                                    const RfChainSet& chains,
                                    LinkDirection direction) {
  if (g.size() != chains.size()) {
    throw std::invalid_argument("channel/chain length mismatch");
  }
  if (direction == LinkDirection::UL) {
    return chains.r_ul.cwiseProduct(g).cwiseProduct(chains.t_ul);
  }
  return chains.r_dl.cwiseProduct(g).cwiseProduct(chains.t_dl);
}

Eigen::VectorXcd reciprocity_factor(const RfChainSet& chains) {
  for (Eigen::Index i = 0; i < chains.size(); ++i) {
    if (std::abs(chains.t_ul(i)) == 0.0 || std::abs(chains.r_ul(i)) == 0.0) {
      throw std::domain_error("uplink chain gain is zero: not invertible");
    }
  }
  return chains.r_dl.cwiseProduct(chains.t_dl)
      .cwiseQuotient(chains.r_ul.cwiseProduct(chains.t_ul));
}

FrequencyResponse oracle_reciprocity(const FrequencyResponse& h_ul,
                                     const RfChainSet& chains) {
  if (h_ul.size() != chains.size()) {
    throw std::invalid_argument("channel/chain length mismatch");
  }
  return reciprocity_factor(chains).cwiseProduct(h_ul);
}

void save_chains(const RfChainSet& chains, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write chains file: " + path);
  const Eigen::VectorXcd* vecs[4] = {&chains.t_ul, &chains.r_ul, &chains.t_dl,
                                     &chains.r_dl};
  for (const auto* v : vecs) {
    for (Eigen::Index i = 0; i < v->size(); ++i) {
      const float re = static_cast<float>((*v)(i).real());
      const float im = static_cast<float>((*v)(i).imag());
      out.write(reinterpret_cast<const char*>(&re), sizeof(float));
      out.write(reinterpret_cast<const char*>(&im), sizeof(float));
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

RfChainSet load_chains(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw std::runtime_error("cannot open chains file: " + path);
  const std::streamoff bytes = in.tellg();
  constexpr std::streamoff kEntry = 2 * sizeof(float);
  if (bytes <= 0 || bytes % (4 * kEntry) != 0) {
    throw std::runtime_error("chains file has invalid size: " + path);
  }
  const Eigen::Index n = bytes / (4 * kEntry);
  in.seekg(0);

  RfChainSet set;
  Eigen::VectorXcd* vecs[4] = {&set.t_ul, &set.r_ul, &set.t_dl, &set.r_dl};
  for (auto* v : vecs) {
    v->resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      float re = 0.0f, im = 0.0f;
      in.read(reinterpret_cast<char*>(&re), sizeof(float));
      in.read(reinterpret_cast<char*>(&im), sizeof(float));
      (*v)(i) = {re, im};
    }
  }
  if (!in) throw std::runtime_error("chains file truncated: " + path);
  return set;
}

}  // namespace tddnet
