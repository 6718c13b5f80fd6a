#include "adasent/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "adasent/error.hpp"

namespace adasent {

Real nll_loss(const Vector& predicted, std::size_t label) {
  if (label >= predicted.dim()) {
    throw InvalidLabelError("label " + std::to_string(label) + " out of range for " +
                            std::to_string(predicted.dim()) + " classes");
  }
  return -std::log(std::max(predicted[label], kProbabilityFloor));
}

namespace {

bool is_pyramid(ModelKind kind) {
  return kind == ModelKind::kAdaSent || kind == ModelKind::kGrConv;
}

}  // namespace

Real recurrent_norm_squared(const ModelParams& params) {
  switch (params.config.kind) {
    case ModelKind::kAdaSent:
    case ModelKind::kGrConv:
      return frobenius_squared(params.composition.w_left) +
             frobenius_squared(params.composition.w_right);
    case ModelKind::kRnn:
      return frobenius_squared(params.forward_rnn.recurrent);
    case ModelKind::kBrnn:
      return frobenius_squared(params.forward_rnn.recurrent) +
             frobenius_squared(params.backward_rnn.recurrent);
    case ModelKind::kCbow:
      return 0.0;
  }
  return 0.0;
}

LossReport objective(std::span<const LabeledSequence> batch, const ModelParams& params,
                     Real lambda, const ForwardOptions& options) {
  if (batch.empty()) throw InvalidInputError("objective over an empty batch");
  LossReport r;
  for (const auto& ex : batch) r.data += nll_loss(forward(params, ex.ids, options).distribution, ex.label);
  r.data /= static_cast<Real>(batch.size());
  r.regularization = lambda * recurrent_norm_squared(params);
  r.total = r.data + r.regularization;
  return r;
}

void add_regularization_gradient(const ModelParams& params, Real lambda, Gradients& grads) {
  if (lambda == 0.0) return;
  auto add = [lambda](const Matrix& w, Matrix& g) {
    auto src = w.values();
    auto dst = g.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] += 2.0 * lambda * src[i];
  };
  auto& g = grads.values;
  if (is_pyramid(params.config.kind)) {
    add(params.composition.w_left, g.composition.w_left);
    add(params.composition.w_right, g.composition.w_right);
  } else if (params.config.kind == ModelKind::kRnn) {
    add(params.forward_rnn.recurrent, g.forward_rnn.recurrent);
  } else if (params.config.kind == ModelKind::kBrnn) {
    add(params.forward_rnn.recurrent, g.forward_rnn.recurrent);
    add(params.backward_rnn.recurrent, g.backward_rnn.recurrent);
  }
}

LossReport accumulate_gradients(std::span<const LabeledSequence> batch, const ModelParams& params,
                                Real lambda, Gradients& grads, const ForwardOptions& options) {
  if (batch.empty()) throw InvalidInputError("gradient over an empty batch");
  const Real scale = 1.0 / static_cast<Real>(batch.size());
  LossReport r;
  for (const auto& ex : batch) {
    const ForwardPass pass = forward(params, ex.ids, options);
    r.data += nll_loss(pass.distribution, ex.label);
    backward(params, pass, ex.label, scale, grads);
  }
  r.data *= scale;
  r.regularization = lambda * recurrent_norm_squared(params);
  r.total = r.data + r.regularization;
  add_regularization_gradient(params, lambda, grads);
  return r;
}

Real central_difference(const std::function<Real(Real)>& f, Real x, Real step) {
  if (!(step > 0.0)) throw InvalidInputError("finite-difference step must be positive");
  return (f(x + step) - f(x - step)) / (2.0 * step);
}

Real finite_difference_grad(std::span<const LabeledSequence> batch, ModelParams& params,
                            Real lambda, std::size_t tensor, std::size_t coordinate, Real step,
                            const ForwardOptions& options) {
  auto views = tensors(params);
  if (tensor >= views.size()) throw IndexError("tensor index out of range");
  if (coordinate >= views[tensor].values.size()) throw IndexError("coordinate out of range");
  Real& slot = views[tensor].values[coordinate];
  const Real original = slot;
  const Real derivative = central_difference(
      [&](Real x) {
        slot = x;
        return objective(batch, params, lambda, options).total;
      },
      original, step);
  slot = original;
  return derivative;
}

Real global_norm(const Gradients& grads) {
  Real acc = 0.0;
  for (const auto& t : tensors(grads.values)) acc += squared_norm(t.values);
  return std::sqrt(acc);
}

Real clip_gradients(Gradients& grads, Real tau) {
  if (!(tau > 0.0)) throw InvalidInputError("clip threshold must be positive");
  const Real norm = global_norm(grads);
  if (norm > tau) {
    const Real scale = tau / norm;
    for (auto& t : tensors(grads.values)) {
      for (auto& x : t.values) x *= scale;
    }
  }
  return norm;
}

AdaGradState AdaGradState::for_params(const ModelParams& params, Real learning_rate,
                                      Real epsilon) {
  AdaGradState s;
  s.learning_rate = learning_rate;
  s.epsilon = epsilon;
  for (const auto& t : tensors(params)) s.accumulators.emplace_back(t.values.size(), 0.0);
  return s;
}

void adagrad_step(ModelParams& params, const Gradients& grads, AdaGradState& state) {
  auto param_views = tensors(params);
  const auto grad_views = tensors(grads.values);
  if (param_views.size() != grad_views.size() ||
      param_views.size() != state.accumulators.size()) {
    throw ShapeError("adagrad_step: parameter, gradient and state tensors differ");
  }
  for (std::size_t t = 0; t < param_views.size(); ++t) {
    auto theta = param_views[t].values;
    const auto g = grad_views[t].values;
    auto& acc = state.accumulators[t];
    if (theta.size() != g.size() || acc.size() != g.size()) {
      throw ShapeError("adagrad_step: shape mismatch in tensor " + param_views[t].name);
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g[i] == 0.0) continue;
      acc[i] += g[i] * g[i];
      theta[i] -= state.learning_rate * g[i] / (std::sqrt(acc[i]) + state.epsilon);
    }
  }
}

std::size_t predict(const ModelParams& params, const std::vector<TokenId>& ids) {
  const auto dist = forward(params, ids).distribution;
  const auto v = dist.values();
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

Real accuracy(const ModelParams& params, std::span<const LabeledSequence> examples) {
  if (examples.empty()) return std::numeric_limits<Real>::quiet_NaN();
  std::size_t correct = 0;
  for (const auto& ex : examples) correct += predict(params, ex.ids) == ex.label ? 1 : 0;
  return static_cast<Real>(correct) / static_cast<Real>(examples.size());
}

TrainResult train(std::span<const LabeledSequence> train_set,
                  std::span<const LabeledSequence> valid_set, EmbeddingTable embeddings,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  std::mt19937_64 init_rng(config.seed);
  return train_from(train_set, valid_set,
                    ModelParams::create(config.model, std::move(embeddings), init_rng), config,
                    on_epoch);
}

TrainResult train_from(std::span<const LabeledSequence> train_set,
                       std::span<const LabeledSequence> valid_set, ModelParams initial,
                       const TrainConfig& config, const EpochCallback& on_epoch) {
  if (train_set.empty()) throw InvalidInputError("training set is empty");
  if (config.batch_size == 0) throw InvalidInputError("batch size must be >= 1");
  if (config.lambda < 0.0) throw InvalidInputError("lambda must be >= 0");
  for (const auto& ex : train_set) {
    if (ex.label >= initial.config.num_classes) {
      throw InvalidLabelError("training label " + std::to_string(ex.label) + " >= K=" +
                              std::to_string(initial.config.num_classes));
    }
  }

  // Shuffling draws from its own stream so it does not depend on how many
  // numbers initialization consumed.
  std::mt19937_64 shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  ModelParams params = std::move(initial);
  Gradients grads = Gradients::zeros_like(params);
  AdaGradState state = AdaGradState::for_params(params, config.learning_rate, config.epsilon);

  TrainResult result;
  result.initial = objective(train_set, params, config.lambda);
  result.best = params;
  Real best_score = -1.0;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<LabeledSequence> batch;
  batch.reserve(config.batch_size);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    EpochMetrics m;
    m.epoch = epoch;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
      batch.clear();
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      for (std::size_t i = start; i < stop; ++i) batch.push_back(train_set[order[i]]);
      grads.clear();
      const LossReport loss = accumulate_gradients(batch, params, config.lambda, grads);
      const Real norm = global_norm(grads);
      if (!std::isfinite(loss.total) || !std::isfinite(norm)) {
        std::ostringstream msg;
        msg << "non-finite training objective at epoch " << epoch << ", batch " << batch_index
            << " (objective=" << loss.total << ", gradient norm=" << norm << ")";
        throw DivergenceError(msg.str());
      }
      m.max_grad_norm = std::max(m.max_grad_norm, norm);
      clip_gradients(grads, config.clip);
      adagrad_step(params, grads, state);
    }
    m.train = objective(train_set, params, config.lambda);
    m.train_accuracy = accuracy(params, train_set);
    m.valid_accuracy = accuracy(params, valid_set);
    m.recurrent_norm = recurrent_norm_squared(params);
    if (!std::isfinite(m.train.total)) {
      throw DivergenceError("non-finite objective after epoch " + std::to_string(epoch));
    }
    const Real score = valid_set.empty() ? m.train_accuracy : m.valid_accuracy;
    if (score > best_score) {
      best_score = score;
      result.best = params;
      result.best_epoch = epoch;
    }
    result.history.push_back(m);
    if (on_epoch) on_epoch(m);
  }
  if (config.epochs == 0) result.best = params;
  return result;
}

}  // namespace adasent
