// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tddnet authors

#include "tddnet/mlp.hpp"

#include <algorithm>
#include <cmath>

namespace tddnet {

namespace {

constexpr double kProbClamp = 1e-12;

template <typename Scalar>
void apply_activation(Activation act,
                      typename MlpT<Scalar>::Matrix& z) {
  using std::exp;
  switch (act) {
    case Activation::linear:
      return;
    case Activation::tanh_fn:
      z = z.array().tanh().matrix();
      return;
    case Activation::sigmoid:
      z = (Scalar(1) / (Scalar(1) + (-z.array()).exp())).matrix();
      return;
    case Activation::softmax:
      for (Eigen::Index c = 0; c < z.cols(); ++c) {
        auto col = z.col(c).array();
        col -= col.maxCoeff();  // overflow guard, shift-invariant
        col = col.exp();
        col /= col.sum();
      }
      return;
  }
  throw std::invalid_argument("unknown activation");
}

/// Elementwise activation derivative expressed through the activation
/// output a (valid for linear/tanh/sigmoid; softmax is handled jointly
/// with cross-entropy in backprop).
template <typename Scalar>
typename MlpT<Scalar>::Matrix activation_deriv(
    Activation act, const typename MlpT<Scalar>::Matrix& a) {
  switch (act) {
    case Activation::linear:
      return MlpT<Scalar>::Matrix::Ones(a.rows(), a.cols());
    case Activation::tanh_fn:
      return (Scalar(1) - a.array().square()).matrix();
    case Activation::sigmoid:
      return (a.array() * (Scalar(1) - a.array())).matrix();
    case Activation::softmax:
      throw std::invalid_argument(
          "softmax derivative is only defined jointly with cross-entropy");
  }
  throw std::invalid_argument("unknown activation");
}

}  // namespace

std::string to_string(Activation act) {
  switch (act) {
    case Activation::linear: return "linear";
    case Activation::tanh_fn: return "tanh";
    case Activation::sigmoid: return "sigmoid";
    case Activation::softmax: return "softmax";
  }
  return "?";
}

void MlpSpec::validate() const {
  if (layer_dims.size() < 2) {
    throw std::invalid_argument("need at least input and output layers");
  }
  if (activations.size() != layer_dims.size() - 1) {
    throw std::invalid_argument("one activation per non-input layer required");
  }
  for (int d : layer_dims) {
    if (d < 1) throw std::invalid_argument("layer dims must be positive");
  }
  for (std::size_t i = 0; i + 1 < activations.size(); ++i) {
    if (activations[i] == Activation::softmax) {
      throw std::invalid_argument("softmax only allowed at the output layer");
    }
  }
}

template <typename Scalar>
MlpT<Scalar> MlpT<Scalar>::zeros(const MlpSpec& spec) {
  spec.validate();
  MlpT model;
  model.spec = spec;
  for (int l = 0; l < spec.num_layers(); ++l) {
    model.weights.push_back(
        Matrix::Zero(spec.layer_dims[l + 1], spec.layer_dims[l]));
    model.biases.push_back(Vector::Zero(spec.layer_dims[l + 1]));
  }
  return model;
}

template <typename Scalar>
MlpT<Scalar> MlpT<Scalar>::glorot(const MlpSpec& spec, RandomStream& rng) {
  MlpT model = zeros(spec);
  for (auto& w : model.weights) {
    const double limit = std::sqrt(6.0 / double(w.rows() + w.cols()));
    // Row-major fill order: part of the determinism contract.
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        w(r, c) = static_cast<Scalar>((2.0 * rng.uniform() - 1.0) * limit);
      }
    }
  }
  return model;
}

template <typename Scalar>
typename MlpT<Scalar>::Matrix MlpT<Scalar>::forward_batch(
    const Matrix& inputs) const {
  if (inputs.rows() != spec.input_dim()) {
    throw std::invalid_argument("input dim does not match model");
  }
  Matrix a = inputs;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    Matrix z = weights[l] * a;
    z.colwise() += biases[l];
    apply_activation<Scalar>(spec.activations[l], z);
    a = std::move(z);
  }
  return a;
}

template <typename Scalar>
typename MlpT<Scalar>::Vector MlpT<Scalar>::forward(
    const Vector& input) const {
  return forward_batch(input);
}

template <typename Scalar>
std::size_t MlpT<Scalar>::num_params() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
  for (const auto& b : biases) n += static_cast<std::size_t>(b.size());
  return n;
}

template <typename Scalar>
double loss_cross_entropy(const typename MlpT<Scalar>::Vector& probs,
                          const typename MlpT<Scalar>::Vector& one_hot) {
  if (probs.size() != one_hot.size()) {
    throw std::invalid_argument("loss length mismatch");
  }
  Eigen::Index label = 0;
  one_hot.maxCoeff(&label);
  const double p = std::max(static_cast<double>(probs(label)), kProbClamp);
  return -std::log(p);
}

template <typename Scalar>
double loss_mse(const typename MlpT<Scalar>::Vector& pred,
                const typename MlpT<Scalar>::Vector& target) {
  if (pred.size() != target.size()) {
    throw std::invalid_argument("loss length mismatch");
  }
  return (pred - target).template cast<double>().squaredNorm() /
         static_cast<double>(pred.size());
}

namespace {

template <typename Scalar>
double batch_loss(const typename MlpT<Scalar>::Matrix& output,
                  const typename MlpT<Scalar>::Matrix& targets,
                  LossKind loss) {
  const auto batch = static_cast<double>(output.cols());
  if (loss == LossKind::mse) {
    return (output - targets).template cast<double>().squaredNorm() /
           (static_cast<double>(output.rows()) * batch);
  }
  double total = 0.0;
  for (Eigen::Index c = 0; c < output.cols(); ++c) {
    total += loss_cross_entropy<Scalar>(output.col(c), targets.col(c));
  }
  return total / batch;
}

}  // namespace

template <typename Scalar>
double eval_loss(const MlpT<Scalar>& model,
                 const typename MlpT<Scalar>::Matrix& inputs,
                 const typename MlpT<Scalar>::Matrix& targets, LossKind loss) {
  return batch_loss<Scalar>(model.forward_batch(inputs), targets, loss);
}

template <typename Scalar>
double backprop(const MlpT<Scalar>& model,
                const typename MlpT<Scalar>::Matrix& inputs,
                const typename MlpT<Scalar>::Matrix& targets, LossKind loss,
                GradientsT<Scalar>& grads) {
  using Matrix = typename MlpT<Scalar>::Matrix;

  const int n_layers = model.spec.num_layers();
  const Activation out_act = model.spec.activations[n_layers - 1];
  if (loss == LossKind::cross_entropy && out_act != Activation::softmax) {
    throw std::invalid_argument("cross-entropy requires a softmax output");
  }
  if (loss == LossKind::mse && out_act == Activation::softmax) {
    throw std::invalid_argument("mse with softmax output is unsupported");
  }
  if (inputs.cols() != targets.cols()) {
    throw std::invalid_argument("batch size mismatch");
  }

  // Forward, keeping every layer's activation.
  std::vector<Matrix> acts;
  acts.reserve(n_layers + 1);
  acts.push_back(inputs);
  for (int l = 0; l < n_layers; ++l) {
    Matrix z = model.weights[l] * acts.back();
    z.colwise() += model.biases[l];
    apply_activation<Scalar>(model.spec.activations[l], z);
    acts.push_back(std::move(z));
  }
  const double loss_value = batch_loss<Scalar>(acts.back(), targets, loss);

  grads.d_weights.resize(n_layers);
  grads.d_biases.resize(n_layers);

  const Scalar inv_batch = Scalar(1) / Scalar(inputs.cols());
  // Gradient of the batch-mean loss w.r.t. the output pre-activation.
  Matrix dz;
  if (loss == LossKind::cross_entropy) {
    // Softmax + CE collapse: dL/dz = (p - y) / batch.
    dz = (acts.back() - targets) * inv_batch;
  } else {
    const Matrix da = (acts.back() - targets) *
                      (Scalar(2) * inv_batch / Scalar(acts.back().rows()));
    dz = da.cwiseProduct(activation_deriv<Scalar>(out_act, acts.back()));
  }

  for (int l = n_layers - 1; l >= 0; --l) {
    grads.d_weights[l].noalias() = dz * acts[l].transpose();
    grads.d_biases[l] = dz.rowwise().sum();
    if (l > 0) {
      const Matrix da_prev = model.weights[l].transpose() * dz;
      dz = da_prev.cwiseProduct(
          activation_deriv<Scalar>(model.spec.activations[l - 1], acts[l]));
    }
  }
  return loss_value;
}

// The float core runs production training; the double core backs the
// finite-difference gradient checker.
template struct MlpT<float>;
template struct MlpT<double>;
template double loss_cross_entropy<float>(const MlpT<float>::Vector&,
                                          const MlpT<float>::Vector&);
template double loss_cross_entropy<double>(const MlpT<double>::Vector&,
                                           const MlpT<double>::Vector&);
template double loss_mse<float>(const MlpT<float>::Vector&,
                                const MlpT<float>::Vector&);
template double loss_mse<double>(const MlpT<double>::Vector&,
                                 const MlpT<double>::Vector&);
template double eval_loss<float>(const MlpT<float>&, const MlpT<float>::Matrix&,
                                 const MlpT<float>::Matrix&, LossKind);
template double eval_loss<double>(const MlpT<double>&,
                                  const MlpT<double>::Matrix&,
                                  const MlpT<double>::Matrix&, LossKind);
template double backprop<float>(const MlpT<float>&, const MlpT<float>::Matrix&,
                                const MlpT<float>::Matrix&, LossKind,
                                GradientsT<float>&);
template double backprop<double>(const MlpT<double>&,
                                 const MlpT<double>::Matrix&,
                                 const MlpT<double>::Matrix&, LossKind,
                                 GradientsT<double>&);

}  // namespace tddnet
