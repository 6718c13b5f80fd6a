#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "adasent/numerics.hpp"

namespace adasent {

enum class PoolingKind { kAverage, kMax };

std::string_view to_string(PoolingKind kind);
PoolingKind parse_pooling(std::string_view name);

/// Parameters shared by every node of the pyramid.
struct CompositionParams {
  Matrix w_left;   ///< D x D
  Matrix w_right;  ///< D x D
  Vector b_w;      ///< D
  Matrix g_left;   ///< 3 x D, gate logits (left, right, composed)
  Matrix g_right;  ///< 3 x D
  Vector b_g;      ///< 3

  static CompositionParams zeros(std::size_t dim);
  static CompositionParams random(std::size_t dim, std::mt19937_64& rng);

  std::size_t dim() const noexcept { return w_left.rows(); }
  /// Throws ShapeError if the tensors are not mutually consistent.
  void validate() const;
};

/// Convex weights over (left child, right child, composed candidate).
struct GateCoefficients {
  Real left = 0.0;
  Real right = 0.0;
  Real composed = 0.0;
};

struct NodeCache {
  GateCoefficients gates;
  Vector candidate;   ///< tanh(W_L l + W_R r + b_W)
  Vector derivative;  ///< 1 - candidate^2
  bool gates_forced = false;
};

struct ComposedNode {
  Vector out;
  NodeCache cache;
};

/// One local composition step. `forced_gates` replaces the softmax gate
/// output (used to probe the endpoint identities); forced gates are treated
/// as constants by the backward pass.
ComposedNode compose_node(const Vector& left, const Vector& right, const CompositionParams& params,
                          const std::optional<GateCoefficients>& forced_gates = std::nullopt);

/// Every unit and node cache of a forward pass. Level indices are 0-based:
/// level 0 holds the T projected word vectors, level t holds T - t units and
/// unit j of level t covers tokens j .. j + t.
struct PyramidTrace {
  std::vector<std::vector<Vector>> levels;
  /// nodes[t][j] caches the composition producing levels[t][j]; nodes[0] is empty.
  std::vector<std::vector<NodeCache>> nodes;

  std::size_t length() const noexcept { return levels.empty() ? 0 : levels.front().size(); }
  std::size_t num_levels() const noexcept { return levels.size(); }
  const Vector& top() const { return levels.back().front(); }
};

struct PyramidOptions {
  std::optional<GateCoefficients> forced_gates;
};

PyramidTrace forward_pyramid(std::span<const Vector> words, const CompositionParams& params,
                             const PyramidOptions& options = {});

struct PooledLevel {
  Vector value;
  /// For max pooling, the winning unit per coordinate (lowest index on ties).
  std::vector<std::size_t> argmax;
};

/// Coordinatewise mean or max over a nonempty set of equally sized vectors.
PooledLevel pool_units(std::span<const Vector> units, PoolingKind kind);

PooledLevel pool_level(const PyramidTrace& trace, std::size_t level, PoolingKind kind);

/// Pooled summaries of every pyramid level, bottom to top.
struct Hierarchy {
  std::vector<Vector> summaries;
  std::vector<std::vector<std::size_t>> argmax;
  PoolingKind kind = PoolingKind::kAverage;

  std::size_t size() const noexcept { return summaries.size(); }
};

Hierarchy build_hierarchy(const PyramidTrace& trace, PoolingKind kind);

/// Per-unit gradient buffers shaped like `trace.levels`, zero filled.
std::vector<std::vector<Vector>> zero_unit_grads(const PyramidTrace& trace);

/// Adds dL/d(summary of `level`) into the per-unit buffers.
void scatter_pooled_gradient(const PyramidTrace& trace, const Hierarchy& hierarchy,
                             std::size_t level, const Vector& summary_grad,
                             std::vector<std::vector<Vector>>& unit_grads);

/// Mirrors pool_units for external callers (cBoW).
void scatter_pooled_units(std::size_t count, PoolingKind kind, const PooledLevel& pooled,
                          const Vector& pooled_grad, std::vector<Vector>& unit_grads);

/// Backpropagation through the pyramid DAG. `unit_grads` holds dL/dh for
/// every unit as collected from the heads; it is consumed top-down (higher
/// levels push their gradient into their children). Parameter gradients are
/// accumulated into `grads`. Returns dL/dh for the level-0 units.
std::vector<Vector> backward_pyramid(const PyramidTrace& trace, const CompositionParams& params,
                                     std::vector<std::vector<Vector>> unit_grads,
                                     CompositionParams& grads);

}  // namespace adasent
