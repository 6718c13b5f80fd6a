#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "adasent/numerics.hpp"
#include "adasent/pyramid.hpp"

namespace adasent {

/// Elman recurrence h_t = tanh(W x_t + H h_{t-1} + b), h_0 = 0.
struct RnnParams {
  Matrix input;      ///< D x D_in
  Matrix recurrent;  ///< D x D
  Vector bias;       ///< D

  static RnnParams zeros(std::size_t input_dim, std::size_t hidden_dim);
  static RnnParams random(std::size_t input_dim, std::size_t hidden_dim, std::mt19937_64& rng);

  std::size_t hidden_dim() const noexcept { return recurrent.rows(); }
};

struct RnnTrace {
  std::vector<Vector> inputs;
  std::vector<Vector> states;  ///< states[t] is the hidden vector after input t
};

Vector cbow_encode(std::span<const Vector> words, PoolingKind kind);

RnnTrace rnn_forward(std::span<const Vector> words, const RnnParams& params);

/// Hidden vector after the last word.
Vector rnn_encode(std::span<const Vector> words, const RnnParams& params);

/// Returns dL/dx_t for every input and accumulates parameter gradients.
std::vector<Vector> rnn_backward(const RnnTrace& trace, const RnnParams& params,
                                 const Vector& final_state_grad, RnnParams& grads);

/// [forward h_T ; backward state at position 1], dimension 2D.
Vector brnn_encode(std::span<const Vector> words, const RnnParams& forward,
                   const RnnParams& backward);

Vector concat(const Vector& a, const Vector& b);

/// Top unit of the pyramid.
Vector grconv_encode(std::span<const Vector> words, const CompositionParams& params);

}  // namespace adasent
