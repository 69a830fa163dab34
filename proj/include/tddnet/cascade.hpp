// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#ifndef TDDNET_CASCADE_HPP
#define TDDNET_CASCADE_HPP

#include <array>
#include <map>
#include <optional>

#include "tddnet/airlink.hpp"
#include "tddnet/config.hpp"
#include "tddnet/dataset.hpp"
#include "tddnet/mlp.hpp"

namespace tddnet {

/// Classifier shape: 2*N_p -> 22 (tanh) -> 22 (sigmoid) -> 5 (softmax).
MlpSpec classifier_spec(int n_pilots);

/// Predictor shape: 2*N_p -> 512 (tanh) -> 128 (tanh) -> 2*N (linear).
MlpSpec predictor_spec(int n_pilots, int n_subcarriers);

/// The cascaded pipeline: one classifier routing to five per-class
/// downlink predictors, all tied to the pilot grid they were trained on.
struct TddnetModel {
  MlpModel classifier;
  std::array<MlpModel, kNumChannelClasses> predictors;
  PilotGrid grid;
  int n_subcarriers = 0;

  void validate() const;
};

struct ClassifyResult {
  ChannelClass cls;           // argmax, ties to the lowest class index
  Eigen::VectorXf probs;      // softmax output, length 5
};

ClassifyResult classify(const TddnetModel& model, const PilotCsi& pilot_csi);

enum class ClassifierMode { learned, oracle };

struct PredictResult {
  ChannelClass used;      // which predictor produced the output
  FrequencyResponse dl;   // full-band downlink prediction, length N
};

/// Runs the pipeline: route (learned classifier, or the supplied true class
/// in oracle mode), then predict the downlink channel at all subcarriers.
/// Interpolation and reciprocity calibration happen jointly inside the
/// predictor; there is no separate calibration step.
PredictResult predict_downlink(
    const TddnetModel& model, const PilotCsi& pilot_csi, ClassifierMode mode,
    std::optional<ChannelClass> true_class = std::nullopt);

/// Deterministic per-model training seed, derived from the master seed.
/// model_idx 0 is the classifier, 1 + class index the predictors; variant
/// distinguishes retrainings (e.g. per-spacing models).
std::uint64_t model_seed(std::uint64_t master_seed, int model_idx,
                         std::uint64_t variant = 0);

/// Trains one per-class predictor on its (pilot CSI -> noiseless DL CSI)
/// pairs with MSE loss.
MlpModel train_predictor(const ExperimentConfig& cfg, const Dataset& data,
                         ChannelClass cls, std::uint64_t seed_variant = 0,
                         TrainLog* log = nullptr);

/// Trains the classifier on pooled labeled pilot CSI with cross-entropy,
/// running classifier_restarts seeded restarts and keeping the best
/// validation loss.  Each class contributes its first classifier_per_class
/// samples as training data; any surplus supplies up to
/// classifier_val_per_class columns from the end as a validation set shared
/// across restarts (make_classifier_dataset emits exactly this layout).
MlpModel train_classifier(const ExperimentConfig& cfg,
                          const std::map<ChannelClass, Dataset>& per_class,
                          TrainLog* log = nullptr);

struct CascadeLogs {
  TrainLog classifier;
  std::map<ChannelClass, TrainLog> predictors;
};

/// Classifier plus all five predictors, individually trained.  The
/// classifier trains on classifier_data, the predictors on per_class.
TddnetModel train_cascade(const ExperimentConfig& cfg,
                          const std::map<ChannelClass, Dataset>& per_class,
                          const std::map<ChannelClass, Dataset>& classifier_data,
                          CascadeLogs* logs = nullptr);

/// Convenience overload: one dataset per class serves both roles.
TddnetModel train_cascade(const ExperimentConfig& cfg,
                          const std::map<ChannelClass, Dataset>& per_class,
                          CascadeLogs* logs = nullptr);

/// Bundle directory round-trip: classifier.mdl, predictor_{A..E}.mdl and a
/// manifest.txt recording grid, N, flatten layout and seed.
void save_cascade(const TddnetModel& model, const std::string& dir,
                  const ExperimentConfig& cfg);
TddnetModel load_cascade(const std::string& dir);

}  // namespace tddnet

#endif  // TDDNET_CASCADE_HPP
