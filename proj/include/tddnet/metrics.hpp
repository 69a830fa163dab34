// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#ifndef TDDNET_METRICS_HPP
#define TDDNET_METRICS_HPP

#include "tddnet/chanmodel.hpp"

namespace tddnet {

/// mse = mean_n |pred(n) - truth(n)|^2.
double metric_mse(const FrequencyResponse& pred,
                  const FrequencyResponse& truth);

/// nmse = mse / mean_n |truth(n)|^2.  Zero-power truth is an error.
double metric_nmse(const FrequencyResponse& pred,
                   const FrequencyResponse& truth);

/// Pooled error over many samples: ratios of sums rather than means of
/// ratios, so deep-fade samples cannot dominate the aggregate.
class NmseAccumulator {
 public:
  void add(const FrequencyResponse& pred, const FrequencyResponse& truth);

  /// Folds another accumulator's tallies into this one, as if its samples
  /// had been added here directly.
  void merge(const NmseAccumulator& other);

  long num_samples() const { return n_samples_; }
  double mse() const;   // pooled mean squared error per subcarrier
  double nmse() const;  // pooled error power / pooled truth power

 private:
  double err_sum_ = 0.0;
  double pow_sum_ = 0.0;
  long n_elems_ = 0;
  long n_samples_ = 0;
};

/// Running classification accuracy.
class AccuracyAccumulator {
 public:
  void add(bool correct) {
    ++total_;
    if (correct) ++correct_;
  }
  long total() const { return total_; }
  double accuracy() const;

 private:
  long correct_ = 0;
  long total_ = 0;
};

}  // namespace tddnet

#endif  // TDDNET_METRICS_HPP
