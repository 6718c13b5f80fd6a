#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "adasent/model.hpp"

namespace adasent {

/// A tokenized, vocabulary-mapped training instance.
struct LabeledSequence {
  std::vector<TokenId> ids;
  std::size_t label = 0;
};

/// -log(max(p[label], 1e-12)). Throws InvalidLabelError if label >= K.
Real nll_loss(const Vector& predicted, std::size_t label);

struct LossReport {
  Real data = 0.0;            ///< mean NLL
  Real regularization = 0.0;  ///< lambda * (|W_L|_F^2 + |W_R|_F^2)
  Real total = 0.0;
};

/// Sum of squared Frobenius norms of the recurrent matrices: W_L and W_R for
/// the pyramid models, the hidden-hidden matrices for RNN/BRNN, zero for cBoW.
Real recurrent_norm_squared(const ModelParams& params);

LossReport objective(std::span<const LabeledSequence> batch, const ModelParams& params,
                     Real lambda, const ForwardOptions& options = {});

/// Adds 2 * lambda * W to the recurrent-matrix gradients.
void add_regularization_gradient(const ModelParams& params, Real lambda, Gradients& grads);

/// Forward + backward over the batch: grads += d objective / d theta.
LossReport accumulate_gradients(std::span<const LabeledSequence> batch, const ModelParams& params,
                                Real lambda, Gradients& grads, const ForwardOptions& options = {});

/// (f(x + h) - f(x - h)) / 2h
Real central_difference(const std::function<Real(Real)>& f, Real x, Real step);

/// Central difference of the full objective along one parameter coordinate.
/// `tensor` indexes tensors(params, TensorSet::kTrainable).
Real finite_difference_grad(std::span<const LabeledSequence> batch, ModelParams& params,
                            Real lambda, std::size_t tensor, std::size_t coordinate, Real step,
                            const ForwardOptions& options = {});

Real global_norm(const Gradients& grads);

/// Rescales every buffer by tau / n when the global L2 norm n exceeds tau.
/// Returns n (the norm before clipping).
Real clip_gradients(Gradients& grads, Real tau);

struct AdaGradState {
  Real learning_rate = 0.05;
  Real epsilon = 1e-8;
  std::vector<std::vector<Real>> accumulators;  ///< one per trainable tensor

  static AdaGradState for_params(const ModelParams& params, Real learning_rate,
                                 Real epsilon = 1e-8);
};

/// accumulator += g^2; theta -= lr * g / (sqrt(accumulator) + eps)
void adagrad_step(ModelParams& params, const Gradients& grads, AdaGradState& state);

struct TrainConfig {
  ModelConfig model;
  Real lambda = 1e-4;
  Real learning_rate = 0.05;
  Real clip = 5.0;
  Real epsilon = 1e-8;
  std::size_t batch_size = 32;
  std::size_t epochs = 20;
  std::uint64_t seed = 1;
};

struct EpochMetrics {
  std::size_t epoch = 0;
  LossReport train;
  Real train_accuracy = 0.0;
  Real valid_accuracy = std::numeric_limits<Real>::quiet_NaN();
  Real recurrent_norm = 0.0;  ///< recurrent_norm_squared after the epoch
  Real max_grad_norm = 0.0;   ///< largest pre-clip gradient norm seen in the epoch
};

struct TrainResult {
  ModelParams best;
  std::size_t best_epoch = 0;
  LossReport initial;
  std::vector<EpochMetrics> history;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

/// Minibatch AdaGrad with global norm clipping. Deterministic for a fixed
/// seed. The returned checkpoint is the epoch with the best validation
/// accuracy (training accuracy when `valid` is empty); ties keep the
/// earliest epoch.
TrainResult train(std::span<const LabeledSequence> train_set,
                  std::span<const LabeledSequence> valid_set, EmbeddingTable embeddings,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

/// Same loop starting from existing parameters.
TrainResult train_from(std::span<const LabeledSequence> train_set,
                       std::span<const LabeledSequence> valid_set, ModelParams initial,
                       const TrainConfig& config, const EpochCallback& on_epoch = {});

std::size_t predict(const ModelParams& params, const std::vector<TokenId>& ids);
Real accuracy(const ModelParams& params, std::span<const LabeledSequence> examples);

}  // namespace adasent
