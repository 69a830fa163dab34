// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#ifndef TDDNET_SWEEPS_HPP
#define TDDNET_SWEEPS_HPP

#include <map>
#include <string>
#include <vector>

#include "tddnet/cascade.hpp"
#include "tddnet/config.hpp"
#include "tddnet/metrics.hpp"

namespace tddnet {

struct SweepRow {
  std::string experiment;
  std::string cls;      // channel class name, or "pooled"
  std::string x_name;   // "snr_db" or "spacing"
  double x_value = 0.0;
  std::string method;
  std::string metric;   // "mse", "nmse", "accuracy"
  double value = 0.0;
  long n_samples = 0;
  std::string config_hash;
  std::uint64_t seed = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;

  /// `experiment,class,x_name,x_value,method,metric,value,n_samples,
  /// config_hash,seed` with doubles printed as %.17g: byte-stable across
  /// reruns of the same config + seed.
  std::string to_csv() const;
  void write_csv(const std::string& path) const;

  /// First row matching the filters; throws if absent (test convenience).
  double value_of(const std::string& experiment, const std::string& cls,
                  double x_value, const std::string& method,
                  const std::string& metric) const;
};

/// Classifier accuracy vs SNR, per class and pooled, on fresh test-domain
/// samples (test_per_class per class per SNR point).
SweepResult run_accuracy_sweep(const TddnetModel& model,
                               const ExperimentConfig& cfg,
                               const std::vector<double>& snr_grid);

/// Downlink prediction error vs SNR per class: the learned cascade, the
/// oracle-routed cascade, and the linear/Wiener baselines with and without
/// oracle reciprocity calibration, all on the same per-point sample set.
/// Class-pooled rows (class = "pooled", energy-sum ratios over all classes)
/// follow the per-class blocks.  oracle_only drops the learned-routing rows
/// (the --oracle-classifier flag).
SweepResult run_mse_sweep(const TddnetModel& model, const ExperimentConfig& cfg,
                          const std::vector<double>& snr_grid,
                          bool oracle_only = false);

/// Prediction error vs pilot spacing for one class at one SNR.  Retrains a
/// predictor per spacing (the input width changes with the pilot count).
/// model_cache, when given, memoizes trained predictors by spacing.
SweepResult run_pilot_sweep(const ExperimentConfig& cfg,
                            const std::vector<int>& spacings,
                            ChannelClass cls = ChannelClass::TDL_C,
                            double snr_db = 22.0,
                            std::map<int, MlpModel>* model_cache = nullptr);

/// Matched predictor vs the TDL-A predictor applied to every class.
SweepResult run_mismatch(const TddnetModel& model, const ExperimentConfig& cfg,
                         const std::vector<double>& snr_grid);

}  // namespace tddnet

#endif  // TDDNET_SWEEPS_HPP
