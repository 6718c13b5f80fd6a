#include "adasent/ensemble.hpp"

#include <cmath>
#include <string>

#include "adasent/error.hpp"

namespace adasent {

namespace {

void fill_uniform(Matrix& m, std::mt19937_64& rng) {
  const Real bound = std::sqrt(6.0 / static_cast<Real>(m.rows() + m.cols()));
  std::uniform_real_distribution<Real> dist(-bound, bound);
  for (auto& x : m.values()) x = dist(rng);
}

// Vector-Jacobian product of softmax: dz = p * (dp - <p, dp>).
Vector softmax_backward(const Vector& probs, const Vector& probs_grad) {
  const Real mean = dot(probs, probs_grad);
  Vector out(probs.dim());
  for (std::size_t k = 0; k < probs.dim(); ++k) out[k] = probs[k] * (probs_grad[k] - mean);
  return out;
}

}  // namespace

ClassifierParams ClassifierParams::zeros(std::size_t input_dim, std::size_t hidden_dim,
                                         std::size_t num_classes) {
  return {Matrix(hidden_dim, input_dim), Vector(hidden_dim), Matrix(num_classes, hidden_dim),
          Vector(num_classes)};
}

ClassifierParams ClassifierParams::random(std::size_t input_dim, std::size_t hidden_dim,
                                          std::size_t num_classes, std::mt19937_64& rng) {
  auto p = zeros(input_dim, hidden_dim, num_classes);
  fill_uniform(p.w_hidden, rng);
  fill_uniform(p.w_out, rng);
  return p;
}

ClassifierTrace classify_level_traced(const Vector& input, const ClassifierParams& params) {
  if (input.dim() != params.input_dim()) {
    throw ShapeError("classifier expects input dim " + std::to_string(params.input_dim()) +
                     ", got " + std::to_string(input.dim()));
  }
  ClassifierTrace trace;
  trace.input = input;
  trace.hidden = tanh_map(affine(params.w_hidden, input, params.b_hidden)).activated;
  trace.probs = softmax(affine(params.w_out, trace.hidden, params.b_out));
  return trace;
}

Vector classify_level(const Vector& input, const ClassifierParams& params) {
  return classify_level_traced(input, params).probs;
}

Vector classifier_backward(const ClassifierTrace& trace, const ClassifierParams& params,
                           const Vector& probs_grad, ClassifierParams& grads) {
  const Vector logit_grad = softmax_backward(trace.probs, probs_grad);
  add_outer(grads.w_out, logit_grad, trace.hidden);
  axpy(1.0, logit_grad, grads.b_out);
  Vector hidden_grad = matvec_transposed(params.w_out, logit_grad);
  for (std::size_t i = 0; i < hidden_grad.dim(); ++i) {
    hidden_grad[i] *= 1.0 - trace.hidden[i] * trace.hidden[i];
  }
  add_outer(grads.w_hidden, hidden_grad, trace.input);
  axpy(1.0, hidden_grad, grads.b_hidden);
  return matvec_transposed(params.w_hidden, hidden_grad);
}

BeliefVector belief_scores(const Hierarchy& hierarchy, const GatingParams& gating) {
  if (hierarchy.size() == 0) throw EmptySentenceError("belief_scores: empty hierarchy");
  Vector logits(hierarchy.size());
  for (std::size_t t = 0; t < hierarchy.size(); ++t) {
    logits[t] = dot(gating.score, hierarchy.summaries[t]) + gating.bias;
  }
  return softmax(logits);
}

MixturePrediction mixture_predict(const Hierarchy& hierarchy, const ClassifierParams& classifier,
                                  const GatingParams& gating,
                                  const std::optional<BeliefVector>& forced_beliefs) {
  MixturePrediction out;
  if (forced_beliefs) {
    if (forced_beliefs->dim() != hierarchy.size()) {
      throw ShapeError("forced belief vector length does not match the hierarchy");
    }
    out.beliefs = *forced_beliefs;
    out.beliefs_forced = true;
  } else {
    out.beliefs = belief_scores(hierarchy, gating);
  }
  out.distribution = Vector(classifier.num_classes());
  out.levels.reserve(hierarchy.size());
  for (std::size_t t = 0; t < hierarchy.size(); ++t) {
    out.levels.push_back(classify_level_traced(hierarchy.summaries[t], classifier));
    axpy(out.beliefs[t], out.levels.back().probs, out.distribution);
  }
  return out;
}

std::vector<Vector> mixture_backward(const MixturePrediction& prediction,
                                     const Hierarchy& hierarchy,
                                     const ClassifierParams& classifier,
                                     const GatingParams& gating, const Vector& distribution_grad,
                                     ClassifierParams& classifier_grads,
                                     GatingParams& gating_grads) {
  const std::size_t levels = hierarchy.size();
  std::vector<Vector> summary_grads;
  summary_grads.reserve(levels);
  Vector belief_grad(levels);
  for (std::size_t t = 0; t < levels; ++t) {
    const auto& level = prediction.levels[t];
    belief_grad[t] = dot(level.probs, distribution_grad);
    summary_grads.push_back(classifier_backward(level, classifier,
                                                prediction.beliefs[t] * distribution_grad,
                                                classifier_grads));
  }
  if (prediction.beliefs_forced) return summary_grads;

  const Vector score_grad = softmax_backward(prediction.beliefs, belief_grad);
  for (std::size_t t = 0; t < levels; ++t) {
    axpy(score_grad[t], hierarchy.summaries[t], gating_grads.score);
    gating_grads.bias += score_grad[t];
    axpy(score_grad[t], gating.score, summary_grads[t]);
  }
  return summary_grads;
}

}  // namespace adasent
