// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#include "tddnet/metrics.hpp"

#include <stdexcept>

namespace tddnet {

double metric_mse(const FrequencyResponse& pred,
                  const FrequencyResponse& truth) {
  if (pred.size() != truth.size() || pred.size() == 0) {
    throw std::invalid_argument("metric length mismatch");
  }
  return (pred - truth).squaredNorm() / static_cast<double>(pred.size());
}

double metric_nmse(const FrequencyResponse& pred,
                   const FrequencyResponse& truth) {
  const double power = truth.squaredNorm() / static_cast<double>(truth.size());
  if (power == 0.0) {
    throw std::domain_error("NMSE undefined for zero-power truth");
  }
  return metric_mse(pred, truth) / power;
}

void NmseAccumulator::add(const FrequencyResponse& pred,
                          const FrequencyResponse& truth) {
  if (pred.size() != truth.size() || pred.size() == 0) {
    throw std::invalid_argument("metric length mismatch");
  }
  err_sum_ += (pred - truth).squaredNorm();
  pow_sum_ += truth.squaredNorm();
  n_elems_ += pred.size();
  ++n_samples_;
}

void NmseAccumulator::merge(const NmseAccumulator& other) {
  err_sum_ += other.err_sum_;
  pow_sum_ += other.pow_sum_;
  n_elems_ += other.n_elems_;
  n_samples_ += other.n_samples_;
}

double NmseAccumulator::mse() const {
  if (n_elems_ == 0) throw std::logic_error("no samples accumulated");
  return err_sum_ / static_cast<double>(n_elems_);
}

double NmseAccumulator::nmse() const {
  if (n_elems_ == 0) throw std::logic_error("no samples accumulated");
  if (pow_sum_ == 0.0) {
    throw std::domain_error("NMSE undefined for zero-power truth");
  }
  return err_sum_ / pow_sum_;
}

double AccuracyAccumulator::accuracy() const {
  if (total_ == 0) throw std::logic_error("no samples accumulated");
  return static_cast<double>(correct_) / static_cast<double>(total_);
}

}  // namespace tddnet
