// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <numeric>
#include <sstream>

#include "tddnet/hashutil.hpp"
#include "tddnet/mlp.hpp"

namespace tddnet {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("learning rate must be positive");
  }
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (max_epochs < 1) throw std::invalid_argument("max epochs must be >= 1");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw std::invalid_argument("validation fraction must be in (0, 1)");
  }
  if (early_stop_patience < 1) {
    throw std::invalid_argument("patience must be >= 1");
  }
  if (lr_decay_patience < 0) {
    throw std::invalid_argument("lr decay patience must be >= 0");
  }
  if (!(lr_decay_factor > 0.0 && lr_decay_factor < 1.0)) {
    throw std::invalid_argument("lr decay factor must be in (0, 1)");
  }
  if (min_learning_rate < 0.0) {
    throw std::invalid_argument("minimum learning rate must be >= 0");
  }
}

OptimizerState OptimizerState::init_for(const MlpModel& model) {
  OptimizerState st;
  for (const auto& w : model.weights) {
    st.m_weights.push_back(Eigen::MatrixXf::Zero(w.rows(), w.cols()));
    st.v_weights.push_back(Eigen::MatrixXf::Zero(w.rows(), w.cols()));
  }
  for (const auto& b : model.biases) {
    st.m_biases.push_back(Eigen::VectorXf::Zero(b.size()));
    st.v_biases.push_back(Eigen::VectorXf::Zero(b.size()));
  }
  return st;
}

namespace {

void adam_update(Eigen::Ref<Eigen::MatrixXf> param,
                 const Eigen::MatrixXf& grad, Eigen::Ref<Eigen::MatrixXf> m,
                 Eigen::Ref<Eigen::MatrixXf> v, const TrainConfig& cfg,
                 long step) {
  const float b1 = static_cast<float>(cfg.adam_beta1);
  const float b2 = static_cast<float>(cfg.adam_beta2);
  const float eps = static_cast<float>(cfg.adam_epsilon);
  const float corr1 = 1.0f - std::pow(b1, static_cast<float>(step));
  const float corr2 = 1.0f - std::pow(b2, static_cast<float>(step));
  const float lr = static_cast<float>(cfg.learning_rate);

  m = b1 * m + (1.0f - b1) * grad;
  v = b2 * v + (1.0f - b2) * grad.cwiseProduct(grad);
  param.array() -=
      lr * (m.array() / corr1) / ((v.array() / corr2).sqrt() + eps);
}

}  // namespace

double train_step(MlpModel& model, const Eigen::MatrixXf& inputs,
                  const Eigen::MatrixXf& targets, LossKind loss,
                  const TrainConfig& cfg, OptimizerState& state) {
  GradientsT<float> grads;
  const double batch_loss = backprop(model, inputs, targets, loss, grads);
  if (!std::isfinite(batch_loss)) {
    throw TrainingError("non-finite training loss", "");
  }

  if (cfg.optimizer == OptimizerKind::sgd) {
    const float lr = static_cast<float>(cfg.learning_rate);
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
      model.weights[l] -= lr * grads.d_weights[l];
      model.biases[l] -= lr * grads.d_biases[l];
    }
    return batch_loss;
  }

  ++state.step;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    adam_update(model.weights[l], grads.d_weights[l], state.m_weights[l],
                state.v_weights[l], cfg, state.step);
    adam_update(model.biases[l], grads.d_biases[l], state.m_biases[l],
                state.v_biases[l], cfg, state.step);
  }
  return batch_loss;
}

std::string TrainLog::to_string() const {
  std::ostringstream os;
  os << "epoch,train_loss,val_loss\n";
  for (const EpochLog& e : epochs) {
    os << e.epoch << ',' << e.train_loss << ',' << e.val_loss << '\n';
  }
  os << "best_epoch=" << best_epoch << " best_val_loss=" << best_val_loss
     << '\n';
  return os.str();
}

namespace {

/// Content-addressed canonical ordering: samples sorted by hash of their
/// bytes (ties by full byte comparison), making everything downstream
/// independent of the dataset's storage order.
std::vector<Eigen::Index> canonical_order(const Eigen::MatrixXf& inputs,
                                          const Eigen::MatrixXf& targets) {
  const Eigen::Index n = inputs.cols();
  const std::size_t in_bytes = sizeof(float) * inputs.rows();
  const std::size_t tg_bytes = sizeof(float) * targets.rows();

  std::vector<std::uint64_t> hash(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const std::uint64_t h = fnv1a64(inputs.col(j).data(), in_bytes);
    hash[j] = fnv1a64(targets.col(j).data(), tg_bytes, h);
  }
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) {
              if (hash[a] != hash[b]) return hash[a] < hash[b];
              const int c =
                  std::memcmp(inputs.col(a).data(), inputs.col(b).data(),
                              in_bytes);
              if (c != 0) return c < 0;
              return std::memcmp(targets.col(a).data(),
                                 targets.col(b).data(), tg_bytes) < 0;
            });
  return order;
}

template <typename Index>
void fisher_yates(std::vector<Index>& v, RandomStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.uniform_int(i)]);
  }
}

Eigen::MatrixXf gather(const Eigen::MatrixXf& m,
                       const std::vector<Eigen::Index>& idx,
                       std::size_t begin, std::size_t end) {
  Eigen::MatrixXf out(m.rows(), static_cast<Eigen::Index>(end - begin));
  for (std::size_t j = begin; j < end; ++j) {
    out.col(static_cast<Eigen::Index>(j - begin)) = m.col(idx[j]);
  }
  return out;
}

}  // namespace

namespace {

void check_train_args(const MlpSpec& spec, const Eigen::MatrixXf& inputs,
                      const Eigen::MatrixXf& targets) {
  if (inputs.cols() != targets.cols()) {
    throw std::invalid_argument("inputs/targets sample count mismatch");
  }
  if (inputs.rows() != spec.input_dim() || targets.rows() != spec.output_dim()) {
    throw std::invalid_argument("dataset dims do not match network spec");
  }
}

/// Shared loop: mini-batch updates over train_idx into (inputs, targets),
/// validation on (x_val, y_val), best-epoch weights returned.
MlpModel train_loop(const MlpSpec& spec, const Eigen::MatrixXf& inputs,
                    const Eigen::MatrixXf& targets,
                    std::vector<Eigen::Index> train_idx,
                    const Eigen::MatrixXf& x_val, const Eigen::MatrixXf& y_val,
                    LossKind loss, const TrainConfig& cfg,
                    RandomStream& shuffle_rng, TrainLog* log) {
  const Eigen::Index n_train = static_cast<Eigen::Index>(train_idx.size());

  RandomStream init_rng(cfg.seed, StreamPurpose::weight_init,
                        StreamDomain::none, 0, 0);
  MlpModel model = MlpModel::glorot(spec, init_rng);
  OptimizerState state = OptimizerState::init_for(model);
  TrainConfig step_cfg = cfg;  // carries the (possibly decaying) rate

  TrainLog local_log;
  TrainLog& tl = log ? *log : local_log;
  tl.epochs.clear();
  tl.best_epoch = -1;
  tl.best_val_loss = std::numeric_limits<double>::infinity();

  MlpModel best = model;
  int epochs_since_best = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    fisher_yates(train_idx, shuffle_rng);

    double train_loss_sum = 0.0;
    for (Eigen::Index start = 0; start < n_train;
         start += cfg.batch_size) {
      const Eigen::Index stop =
          std::min<Eigen::Index>(start + cfg.batch_size, n_train);
      const Eigen::MatrixXf xb =
          gather(inputs, train_idx, static_cast<std::size_t>(start),
                 static_cast<std::size_t>(stop));
      const Eigen::MatrixXf yb =
          gather(targets, train_idx, static_cast<std::size_t>(start),
                 static_cast<std::size_t>(stop));
      const double batch_loss =
          train_step(model, xb, yb, loss, step_cfg, state);
      train_loss_sum += batch_loss * static_cast<double>(stop - start);
    }
    const double train_loss = train_loss_sum / static_cast<double>(n_train);
    const double val_loss = eval_loss(model, x_val, y_val, loss);
    tl.epochs.push_back({epoch, train_loss, val_loss});
    if (cfg.verbose) {
      std::fprintf(stderr, "    epoch %3d  train %.6g  val %.6g  lr %.3g\n",
                   epoch, train_loss, val_loss, step_cfg.learning_rate);
    }
    if (!std::isfinite(val_loss)) {
      throw TrainingError("validation loss diverged", tl.to_string());
    }

    if (val_loss < tl.best_val_loss) {
      tl.best_val_loss = val_loss;
      tl.best_epoch = epoch;
      best = model;
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
      if (cfg.lr_decay_patience > 0) {
        if (epochs_since_best >= cfg.lr_decay_patience) {
          step_cfg.learning_rate *= cfg.lr_decay_factor;
          epochs_since_best = 0;
          if (step_cfg.learning_rate < cfg.min_learning_rate) break;
        }
      } else if (epochs_since_best >= cfg.early_stop_patience) {
        break;
      }
    }
  }
  return best;
}

}  // namespace

MlpModel train(const MlpSpec& spec, const Eigen::MatrixXf& inputs,
               const Eigen::MatrixXf& targets, LossKind loss,
               const TrainConfig& cfg, TrainLog* log) {
  spec.validate();
  cfg.validate();
  check_train_args(spec, inputs, targets);
  if (inputs.cols() < 2) {
    throw std::invalid_argument("need at least 2 samples to hold out a "
                                "validation split");
  }

  const Eigen::Index n = inputs.cols();
  Eigen::Index n_val = static_cast<Eigen::Index>(
      std::llround(static_cast<double>(n) * cfg.validation_fraction));
  n_val = std::clamp<Eigen::Index>(n_val, 1, n - 1);
  const Eigen::Index n_train = n - n_val;

  std::vector<Eigen::Index> order = canonical_order(inputs, targets);
  RandomStream shuffle_rng(cfg.seed, StreamPurpose::shuffle,
                           StreamDomain::none, 0, 0);
  fisher_yates(order, shuffle_rng);

  const Eigen::MatrixXf x_val =
      gather(inputs, order, static_cast<std::size_t>(n_train),
             static_cast<std::size_t>(n));
  const Eigen::MatrixXf y_val =
      gather(targets, order, static_cast<std::size_t>(n_train),
             static_cast<std::size_t>(n));
  std::vector<Eigen::Index> train_idx(order.begin(), order.begin() + n_train);

  return train_loop(spec, inputs, targets, std::move(train_idx), x_val, y_val,
                    loss, cfg, shuffle_rng, log);
}

MlpModel train(const MlpSpec& spec, const Eigen::MatrixXf& inputs,
               const Eigen::MatrixXf& targets,
               const Eigen::MatrixXf& val_inputs,
               const Eigen::MatrixXf& val_targets, LossKind loss,
               const TrainConfig& cfg, TrainLog* log) {
  spec.validate();
  cfg.validate();
  check_train_args(spec, inputs, targets);
  check_train_args(spec, val_inputs, val_targets);
  if (inputs.cols() < 1 || val_inputs.cols() < 1) {
    throw std::invalid_argument("need at least 1 training and 1 validation "
                                "sample");
  }

  std::vector<Eigen::Index> train_idx = canonical_order(inputs, targets);
  RandomStream shuffle_rng(cfg.seed, StreamPurpose::shuffle,
                           StreamDomain::none, 0, 0);
  return train_loop(spec, inputs, targets, std::move(train_idx), val_inputs,
                    val_targets, loss, cfg, shuffle_rng, log);
}

}  // namespace tddnet
