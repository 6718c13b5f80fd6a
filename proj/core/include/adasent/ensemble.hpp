#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <vector>

#include "adasent/numerics.hpp"
#include "adasent/pyramid.hpp"

namespace adasent {

/// One-hidden-layer MLP g(.) shared by every level of the hierarchy.
struct ClassifierParams {
  Matrix w_hidden;  ///< H x D_in
  Vector b_hidden;  ///< H
  Matrix w_out;     ///< K x H
  Vector b_out;     ///< K

  static ClassifierParams zeros(std::size_t input_dim, std::size_t hidden_dim,
                                std::size_t num_classes);
  static ClassifierParams random(std::size_t input_dim, std::size_t hidden_dim,
                                 std::size_t num_classes, std::mt19937_64& rng);

  std::size_t input_dim() const noexcept { return w_hidden.cols(); }
  std::size_t hidden_dim() const noexcept { return w_hidden.rows(); }
  std::size_t num_classes() const noexcept { return w_out.rows(); }
};

/// Linear scorer applied to each level summary; the scores are normalized
/// across levels with a softmax.
struct GatingParams {
  Vector score;  ///< D
  Real bias = 0.0;

  static GatingParams zeros(std::size_t dim) { return {Vector(dim), 0.0}; }
};

/// gamma_1 .. gamma_T, nonnegative and summing to one.
using BeliefVector = Vector;

struct ClassifierTrace {
  Vector input;
  Vector hidden;  ///< tanh activations
  Vector probs;
};

ClassifierTrace classify_level_traced(const Vector& input, const ClassifierParams& params);

/// softmax(W2 tanh(W1 x + b1) + b2)
Vector classify_level(const Vector& input, const ClassifierParams& params);

/// Accumulates parameter gradients given dL/dprobs; returns dL/dinput.
Vector classifier_backward(const ClassifierTrace& trace, const ClassifierParams& params,
                           const Vector& probs_grad, ClassifierParams& grads);

BeliefVector belief_scores(const Hierarchy& hierarchy, const GatingParams& gating);

struct MixturePrediction {
  Vector distribution;  ///< sum_t gamma_t g(hbar_t)
  BeliefVector beliefs;
  std::vector<ClassifierTrace> levels;
  bool beliefs_forced = false;
};

/// Mixture consensus over the hierarchy. `forced_beliefs` bypasses the
/// gating network (e.g. all mass on the root).
MixturePrediction mixture_predict(const Hierarchy& hierarchy, const ClassifierParams& classifier,
                                  const GatingParams& gating,
                                  const std::optional<BeliefVector>& forced_beliefs = std::nullopt);

/// Backward through the mixture, the classifier and the gating network.
/// Returns dL/dhbar_t for every level.
std::vector<Vector> mixture_backward(const MixturePrediction& prediction,
                                     const Hierarchy& hierarchy,
                                     const ClassifierParams& classifier,
                                     const GatingParams& gating, const Vector& distribution_grad,
                                     ClassifierParams& classifier_grads,
                                     GatingParams& gating_grads);

}  // namespace adasent
