// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#ifndef TDDNET_CONFIG_HPP
#define TDDNET_CONFIG_HPP

#include <string>
#include <vector>

#include "tddnet/airlink.hpp"
#include "tddnet/chanmodel.hpp"
#include "tddnet/mlp.hpp"
#include "tddnet/rffront.hpp"

namespace tddnet {

/// Classifier training defaults: small fixed-rate batches with a plateau
/// schedule over a long epoch budget.  The 22-unit softmax head needs many
/// epochs at decaying rates to sharpen the class boundaries; the predictors
/// converge in tens of epochs with plain early stopping.
TrainConfig classifier_train_defaults();

/// Everything an experiment needs, loadable from a flat `key = value` text
/// file.  Defaults reproduce the headline setup: 256 subcarriers at 30 kHz,
/// 3.5 GHz carrier, 20 km/h terminal, comb pilots every 24th subcarrier,
/// moderately non-reciprocal chains (CN(1, 0.1)), one 0.5 ms TDD slot
/// between uplink sounding and downlink use.
struct ExperimentConfig {
  int n_subcarriers = 256;
  double scs_hz = 30e3;
  double carrier_hz = 3.5e9;
  double sample_rate_hz = 1e8;  // recorded metadata; no tap quantization
  double ue_speed_kmph = 20.0;
  int pilot_spacing = 24;
  std::vector<double> snr_grid_db = {0, 5, 10, 15, 20, 25, 30};
  std::vector<ChannelClass> classes = {kChannelClasses.begin(),
                                       kChannelClasses.end()};
  RfChainConfig rf;
  double beta = 1.0;
  double tdd_delay_s = 5e-4;
  double delay_spread_s = 100e-9;  // TR 38.901 "nominal" scaling
  int m_aps = 1;
  int k_ues = 1;
  int train_per_class = 50000;
  int val_per_class = 5000;
  int classifier_per_class = 10000;  // pooled over classes for the classifier
  int classifier_val_per_class = 500;
  int test_per_class = 10000;        // per sweep point
  double train_snr_min_db = 0.0;   // training pilots draw their SNR
  double train_snr_max_db = 30.0;  // uniformly from this range
  /// Classifier data mix: per-class sample fractions pinned to fixed SNRs,
  /// the remainder drawn from the training-SNR policy.  Class boundaries
  /// sharpen with SNR, so classifier data leans on the high-SNR regime
  /// (which the policy under-represents) with a low-SNR admixture keeping
  /// the mid-range boundaries calibrated.
  std::vector<double> classifier_fixed_snrs_db = {30.0, 20.0};
  std::vector<double> classifier_fixed_fractions = {0.9, 0.1};
  /// Random restarts for the classifier; the restart with the best shared
  /// validation loss wins.  The small softmax head is basin-sensitive.
  int classifier_restarts = 6;
  std::uint64_t master_seed = 1;
  TrainConfig train;
  TrainConfig classifier_train = classifier_train_defaults();

  DopplerSpec doppler() const;
  PilotGrid grid() const;
  int num_pilots() const { return grid().num_pilots(); }
  double validation_fraction() const;
  void validate() const;
};

/// Reads a config file: `key = value` lines, `#` comments, unknown keys are
/// an error, missing keys keep their defaults.
ExperimentConfig load_config(const std::string& path);

/// Applies one `key = value` assignment (the CLI's --set option).
void apply_config_override(ExperimentConfig& cfg, const std::string& key,
                           const std::string& value);

/// Canonical text form: every key, fixed order, one per line.  Two configs
/// are equivalent iff their canonical forms match.
std::string config_canonical(const ExperimentConfig& cfg);

void save_config(const ExperimentConfig& cfg, const std::string& path);

/// 16-hex-digit fingerprint of the canonical form; lands in every CSV row.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace tddnet

#endif  // TDDNET_CONFIG_HPP
