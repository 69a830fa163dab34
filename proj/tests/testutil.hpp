// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#ifndef TDDNET_TESTS_TESTUTIL_HPP
#define TDDNET_TESTS_TESTUTIL_HPP

#include <unistd.h>

#include <complex>
#include <cstring>
#include <filesystem>
#include <string>

#include "tddnet/config.hpp"

namespace tddnet::testutil {

/// Small but non-degenerate experiment: quick enough for unit tests that
/// have to train something.
inline ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.n_subcarriers = 64;
  cfg.pilot_spacing = 8;
  cfg.snr_grid_db = {0.0, 30.0};
  cfg.train_per_class = 400;
  cfg.val_per_class = 80;
  cfg.classifier_per_class = 300;
  cfg.classifier_val_per_class = 60;
  cfg.classifier_restarts = 1;
  cfg.train.max_epochs = 4;
  cfg.train.early_stop_patience = 4;
  cfg.classifier_train.max_epochs = 4;
  cfg.classifier_train.lr_decay_patience = 0;  // plain early stop in tests
  cfg.test_per_class = 50;
  cfg.master_seed = 99;
  cfg.validate();
  return cfg;
}

inline double rel_err(std::complex<double> got, std::complex<double> want) {
  const double denom = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / denom;
}

template <typename Va, typename Vb>
double max_rel_err(const Va& got, const Vb& want) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < got.size(); ++i) {
    worst = std::max(worst, rel_err(got[i], want[i]));
  }
  return worst;
}

/// Strict bit-level equality of two same-shaped Eigen objects.
template <typename M>
bool bits_equal(const M& a, const M& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return std::memcmp(a.data(), b.data(),
                     sizeof(typename M::Scalar) * a.size()) == 0;
}

template <typename Scalar>
bool models_bitwise_equal(const MlpT<Scalar>& a, const MlpT<Scalar>& b) {
  if (a.spec != b.spec) return false;
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    if (!bits_equal(a.weights[l], b.weights[l])) return false;
    if (!bits_equal(a.biases[l], b.biases[l])) return false;
  }
  return true;
}

/// Self-deleting scratch directory under the system temp root.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = (std::filesystem::temp_directory_path() /
             ("tddnet_test_" + tag + "_" + std::to_string(::getpid())))
                .string();
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::string& path() const { return path_; }
  std::string file(const std::string& name) const { return path_ + "/" + name; }

 private:
  std::string path_;
};

}  // namespace tddnet::testutil

#endif  // TDDNET_TESTS_TESTUTIL_HPP
