// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#ifndef TDDNET_MLP_HPP
#define TDDNET_MLP_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tddnet/rng.hpp"

namespace tddnet {

enum class Activation : std::uint8_t {
  linear = 0,
  tanh_fn = 1,
  sigmoid = 2,
  softmax = 3,
};

std::string to_string(Activation act);

enum class LossKind : std::uint8_t {
  mse = 0,
  cross_entropy = 1,  // expects a softmax output layer
};

/// Network shape: layer_dims[0] is the input width; activations has one
/// entry per non-input layer.  Softmax is only allowed at the output.
struct MlpSpec {
  std::vector<int> layer_dims;
  std::vector<Activation> activations;

  int num_layers() const { return static_cast<int>(activations.size()); }
  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  void validate() const;  // throws std::invalid_argument on bad shape

  bool operator==(const MlpSpec&) const = default;
};

/// Dense feed-forward network.  Templated on the scalar so the gradient
/// checker can run the identical code in double precision; production
/// models are 32-bit float (MlpModel below).
template <typename Scalar>
struct MlpT {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  MlpSpec spec;
  std::vector<Matrix> weights;  // per layer, fan_out x fan_in
  std::vector<Vector> biases;   // per layer, fan_out

  /// All parameters zero.
  static MlpT zeros(const MlpSpec& spec);

  /// Glorot-uniform initialization: +-sqrt(6 / (fan_in + fan_out)).
  static MlpT glorot(const MlpSpec& spec, RandomStream& rng);

  /// Forward pass; columns of the matrix overload are independent samples.
  Vector forward(const Vector& input) const;
  Matrix forward_batch(const Matrix& inputs) const;

  std::size_t num_params() const;

  template <typename Other>
  MlpT<Other> cast() const {
    MlpT<Other> out;
    out.spec = spec;
    for (const auto& w : weights)
      out.weights.push_back(w.template cast<Other>());
    for (const auto& b : biases) out.biases.push_back(b.template cast<Other>());
    return out;
  }
};

using MlpModel = MlpT<float>;

/// Parameter gradients, same shapes as the model.
template <typename Scalar>
struct GradientsT {
  std::vector<typename MlpT<Scalar>::Matrix> d_weights;
  std::vector<typename MlpT<Scalar>::Vector> d_biases;
};

/// Per-sample losses.  probs/one_hot versions follow the conventions of
/// categorical cross entropy with probabilities clamped at 1e-12 before the
/// log; mse is the mean over vector components of the squared difference.
/// Both accumulate in double regardless of Scalar.
template <typename Scalar>
double loss_cross_entropy(const typename MlpT<Scalar>::Vector& probs,
                          const typename MlpT<Scalar>::Vector& one_hot);
template <typename Scalar>
double loss_mse(const typename MlpT<Scalar>::Vector& pred,
                const typename MlpT<Scalar>::Vector& target);

/// Batch-mean loss of the model on (inputs, targets) without gradients.
template <typename Scalar>
double eval_loss(const MlpT<Scalar>& model,
                 const typename MlpT<Scalar>::Matrix& inputs,
                 const typename MlpT<Scalar>::Matrix& targets, LossKind loss);

/// Backpropagation: exact gradients of the batch-mean loss.  Returns the
/// batch-mean loss.  cross_entropy requires a softmax output layer and
/// one-hot targets; mse requires a non-softmax output.
template <typename Scalar>
double backprop(const MlpT<Scalar>& model,
                const typename MlpT<Scalar>::Matrix& inputs,
                const typename MlpT<Scalar>::Matrix& targets, LossKind loss,
                GradientsT<Scalar>& grads);

enum class OptimizerKind : std::uint8_t { sgd = 0, adam = 1 };

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 64;
  int max_epochs = 200;
  OptimizerKind optimizer = OptimizerKind::adam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int early_stop_patience = 10;   // epochs without val improvement
  double validation_fraction = 0.1;
  /// Plateau schedule: with lr_decay_patience > 0, that many epochs without
  /// validation improvement multiply the learning rate by lr_decay_factor
  /// instead of stopping; training ends once the rate falls below
  /// min_learning_rate (or at max_epochs).  0 keeps plain early stopping.
  int lr_decay_patience = 0;
  double lr_decay_factor = 0.5;
  double min_learning_rate = 0.0;
  std::uint64_t seed = 0;
  bool verbose = false;  // per-epoch progress on stderr

  void validate() const;
};

/// Adam first/second moment buffers (unused for SGD).
struct OptimizerState {
  std::vector<Eigen::MatrixXf> m_weights, v_weights;
  std::vector<Eigen::VectorXf> m_biases, v_biases;
  long step = 0;

  static OptimizerState init_for(const MlpModel& model);
};

/// Thrown when training diverges; carries the log gathered so far.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, std::string log)
      : std::runtime_error(what), log_(std::move(log)) {}
  const std::string& log() const { return log_; }

 private:
  std::string log_;
};

/// One optimizer update on one mini-batch; returns the batch loss.
double train_step(MlpModel& model, const Eigen::MatrixXf& inputs,
                  const Eigen::MatrixXf& targets, LossKind loss,
                  const TrainConfig& cfg, OptimizerState& state);

struct EpochLog {
  int epoch;
  double train_loss;
  double val_loss;
};

struct TrainLog {
  std::vector<EpochLog> epochs;
  int best_epoch = -1;
  double best_val_loss = 0.0;

  std::string to_string() const;
};

/// Full training loop: canonical-order + seeded shuffle (so the result does
/// not depend on dataset storage order), held-out validation split,
/// mini-batch updates, early stopping on validation loss; returns the
/// parameters of the best validation epoch.  Columns of inputs/targets are
/// samples.  Deterministic given (data multiset, cfg.seed); single-threaded.
MlpModel train(const MlpSpec& spec, const Eigen::MatrixXf& inputs,
               const Eigen::MatrixXf& targets, LossKind loss,
               const TrainConfig& cfg, TrainLog* log = nullptr);

/// Same loop with a caller-supplied validation set; every input column is
/// used for training.  Lets several runs (e.g. random restarts) compete on
/// one common validation set instead of per-run splits.
MlpModel train(const MlpSpec& spec, const Eigen::MatrixXf& inputs,
               const Eigen::MatrixXf& targets,
               const Eigen::MatrixXf& val_inputs,
               const Eigen::MatrixXf& val_targets, LossKind loss,
               const TrainConfig& cfg, TrainLog* log = nullptr);

/// Model file round-trip (format: magic "TDDN", version u16, layer count
/// u16, per-layer fan_in u32 / fan_out u32 / activation u8, then per-layer
/// weights row-major and biases as little-endian f32, trailing CRC32).
void save_model(const MlpModel& model, const std::string& path);
MlpModel load_model(const std::string& path);

}  // namespace tddnet

#endif  // TDDNET_MLP_HPP
