#include "adasent/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "adasent/error.hpp"

namespace adasent {

RnnParams RnnParams::zeros(std::size_t input_dim, std::size_t hidden_dim) {
  return {Matrix(hidden_dim, input_dim), Matrix(hidden_dim, hidden_dim), Vector(hidden_dim)};
}

RnnParams RnnParams::random(std::size_t input_dim, std::size_t hidden_dim, std::mt19937_64& rng) {
  auto p = zeros(input_dim, hidden_dim);
  const Real in_bound = std::sqrt(6.0 / static_cast<Real>(input_dim + hidden_dim));
  const Real rec_bound = std::sqrt(6.0 / static_cast<Real>(2 * hidden_dim));
  std::uniform_real_distribution<Real> in_dist(-in_bound, in_bound);
  std::uniform_real_distribution<Real> rec_dist(-rec_bound, rec_bound);
  for (auto& x : p.input.values()) x = in_dist(rng);
  for (auto& x : p.recurrent.values()) x = rec_dist(rng);
  return p;
}

Vector cbow_encode(std::span<const Vector> words, PoolingKind kind) {
  if (words.empty()) throw EmptySentenceError();
  return pool_units(words, kind).value;
}

RnnTrace rnn_forward(std::span<const Vector> words, const RnnParams& params) {
  if (words.empty()) throw EmptySentenceError();
  RnnTrace trace;
  trace.inputs.assign(words.begin(), words.end());
  trace.states.reserve(words.size());
  Vector state(params.hidden_dim());
  for (const auto& x : words) {
    Vector pre = affine(params.input, x, params.bias);
    pre += matvec(params.recurrent, state);
    state = tanh_map(pre).activated;
    trace.states.push_back(state);
  }
  return trace;
}

Vector rnn_encode(std::span<const Vector> words, const RnnParams& params) {
  return rnn_forward(words, params).states.back();
}

std::vector<Vector> rnn_backward(const RnnTrace& trace, const RnnParams& params,
                                 const Vector& final_state_grad, RnnParams& grads) {
  const std::size_t length = trace.states.size();
  std::vector<Vector> input_grads(length);
  Vector state_grad = final_state_grad;
  for (std::size_t t = length; t-- > 0;) {
    const Vector& h = trace.states[t];
    Vector pre_grad(h.dim());
    for (std::size_t i = 0; i < h.dim(); ++i) pre_grad[i] = state_grad[i] * (1.0 - h[i] * h[i]);
    add_outer(grads.input, pre_grad, trace.inputs[t]);
    axpy(1.0, pre_grad, grads.bias);
    input_grads[t] = matvec_transposed(params.input, pre_grad);
    if (t > 0) {
      add_outer(grads.recurrent, pre_grad, trace.states[t - 1]);
      state_grad = matvec_transposed(params.recurrent, pre_grad);
    }
  }
  return input_grads;
}

Vector concat(const Vector& a, const Vector& b) {
  std::vector<Real> out(a.raw());
  out.insert(out.end(), b.raw().begin(), b.raw().end());
  return Vector(std::move(out));
}

Vector brnn_encode(std::span<const Vector> words, const RnnParams& forward,
                   const RnnParams& backward) {
  std::vector<Vector> reversed(words.rbegin(), words.rend());
  return concat(rnn_encode(words, forward), rnn_encode(reversed, backward));
}

Vector grconv_encode(std::span<const Vector> words, const CompositionParams& params) {
  return forward_pyramid(words, params).top();
}

}  // namespace adasent
