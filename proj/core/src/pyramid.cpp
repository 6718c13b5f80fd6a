#include "adasent/pyramid.hpp"

#include <cmath>
#include <string>

#include "adasent/error.hpp"

namespace adasent {

std::string_view to_string(PoolingKind kind) {
  return kind == PoolingKind::kAverage ? "average" : "max";
}

PoolingKind parse_pooling(std::string_view name) {
  if (name == "average" || name == "avg" || name == "mean") return PoolingKind::kAverage;
  if (name == "max") return PoolingKind::kMax;
  throw InvalidInputError("unknown pooling kind '" + std::string(name) + "'");
}

CompositionParams CompositionParams::zeros(std::size_t dim) {
  return {Matrix(dim, dim), Matrix(dim, dim), Vector(dim),
          Matrix(3, dim),   Matrix(3, dim),   Vector(3)};
}

CompositionParams CompositionParams::random(std::size_t dim, std::mt19937_64& rng) {
  auto p = zeros(dim);
  const Real w_bound = std::sqrt(6.0 / static_cast<Real>(2 * dim));
  const Real g_bound = std::sqrt(6.0 / static_cast<Real>(dim + 3));
  std::uniform_real_distribution<Real> w_dist(-w_bound, w_bound);
  std::uniform_real_distribution<Real> g_dist(-g_bound, g_bound);
  for (auto* m : {&p.w_left, &p.w_right}) {
    for (auto& x : m->values()) x = w_dist(rng);
  }
  for (auto* m : {&p.g_left, &p.g_right}) {
    for (auto& x : m->values()) x = g_dist(rng);
  }
  return p;
}

void CompositionParams::validate() const {
  const std::size_t d = dim();
  const bool ok = w_left.cols() == d && w_right.rows() == d && w_right.cols() == d &&
                  b_w.dim() == d && g_left.rows() == 3 && g_left.cols() == d &&
                  g_right.rows() == 3 && g_right.cols() == d && b_g.dim() == 3;
  if (!ok) throw ShapeError("CompositionParams: inconsistent tensor shapes");
}

ComposedNode compose_node(const Vector& left, const Vector& right, const CompositionParams& params,
                          const std::optional<GateCoefficients>& forced_gates) {
  const std::size_t d = params.dim();
  if (left.dim() != d || right.dim() != d) {
    throw ShapeError("compose_node: children must have dim " + std::to_string(d));
  }
  Vector pre = affine(params.w_left, left, params.b_w);
  pre += matvec(params.w_right, right);
  auto act = tanh_map(pre);

  ComposedNode node;
  node.cache.candidate = std::move(act.activated);
  node.cache.derivative = std::move(act.derivative);
  if (forced_gates) {
    node.cache.gates = *forced_gates;
    node.cache.gates_forced = true;
  } else {
    Vector logits = affine(params.g_left, left, params.b_g);
    logits += matvec(params.g_right, right);
    const Vector w = softmax(logits);
    node.cache.gates = {w[0], w[1], w[2]};
  }
  const auto& g = node.cache.gates;
  node.out = Vector(d);
  for (std::size_t i = 0; i < d; ++i) {
    node.out[i] = g.left * left[i] + g.right * right[i] + g.composed * node.cache.candidate[i];
  }
  return node;
}

PyramidTrace forward_pyramid(std::span<const Vector> words, const CompositionParams& params,
                             const PyramidOptions& options) {
  if (words.empty()) throw EmptySentenceError();
  const std::size_t length = words.size();
  PyramidTrace trace;
  trace.levels.reserve(length);
  trace.nodes.reserve(length);
  trace.levels.emplace_back(words.begin(), words.end());
  trace.nodes.emplace_back();
  for (std::size_t t = 1; t < length; ++t) {
    const auto& below = trace.levels[t - 1];
    std::vector<Vector> units;
    std::vector<NodeCache> caches;
    units.reserve(length - t);
    caches.reserve(length - t);
    for (std::size_t j = 0; j + t < length; ++j) {
      auto node = compose_node(below[j], below[j + 1], params, options.forced_gates);
      units.push_back(std::move(node.out));
      caches.push_back(std::move(node.cache));
    }
    trace.levels.push_back(std::move(units));
    trace.nodes.push_back(std::move(caches));
  }
  return trace;
}

PooledLevel pool_units(std::span<const Vector> units, PoolingKind kind) {
  if (units.empty()) throw InvalidInputError("pooling over zero units");
  const std::size_t d = units.front().dim();
  PooledLevel pooled{units.front(), {}};
  if (kind == PoolingKind::kAverage) {
    for (std::size_t j = 1; j < units.size(); ++j) pooled.value += units[j];
    pooled.value *= 1.0 / static_cast<Real>(units.size());
    return pooled;
  }
  pooled.argmax.assign(d, 0);
  for (std::size_t j = 1; j < units.size(); ++j) {
    if (units[j].dim() != d) throw ShapeError("pool_units: ragged units");
    for (std::size_t k = 0; k < d; ++k) {
      if (units[j][k] > pooled.value[k]) {
        pooled.value[k] = units[j][k];
        pooled.argmax[k] = j;
      }
    }
  }
  return pooled;
}

PooledLevel pool_level(const PyramidTrace& trace, std::size_t level, PoolingKind kind) {
  if (level >= trace.num_levels()) {
    throw IndexError("pool_level: level " + std::to_string(level) + " out of range [0, " +
                     std::to_string(trace.num_levels()) + ")");
  }
  return pool_units(trace.levels[level], kind);
}

Hierarchy build_hierarchy(const PyramidTrace& trace, PoolingKind kind) {
  Hierarchy h;
  h.kind = kind;
  h.summaries.reserve(trace.num_levels());
  h.argmax.reserve(trace.num_levels());
  for (std::size_t t = 0; t < trace.num_levels(); ++t) {
    auto pooled = pool_level(trace, t, kind);
    h.summaries.push_back(std::move(pooled.value));
    h.argmax.push_back(std::move(pooled.argmax));
  }
  return h;
}

std::vector<std::vector<Vector>> zero_unit_grads(const PyramidTrace& trace) {
  std::vector<std::vector<Vector>> grads;
  grads.reserve(trace.num_levels());
  for (const auto& level : trace.levels) {
    grads.emplace_back(level.size(), Vector(level.front().dim()));
  }
  return grads;
}

void scatter_pooled_units(std::size_t count, PoolingKind kind, const PooledLevel& pooled,
                          const Vector& pooled_grad, std::vector<Vector>& unit_grads) {
  if (unit_grads.size() != count) throw ShapeError("scatter: unit count mismatch");
  if (kind == PoolingKind::kAverage) {
    const Real share = 1.0 / static_cast<Real>(count);
    for (auto& g : unit_grads) axpy(share, pooled_grad, g);
    return;
  }
  for (std::size_t k = 0; k < pooled_grad.dim(); ++k) {
    unit_grads[pooled.argmax[k]][k] += pooled_grad[k];
  }
}

void scatter_pooled_gradient(const PyramidTrace& trace, const Hierarchy& hierarchy,
                             std::size_t level, const Vector& summary_grad,
                             std::vector<std::vector<Vector>>& unit_grads) {
  if (level >= trace.num_levels() || level >= hierarchy.size()) {
    throw IndexError("scatter_pooled_gradient: level out of range");
  }
  PooledLevel view{hierarchy.summaries[level], hierarchy.argmax[level]};
  scatter_pooled_units(trace.levels[level].size(), hierarchy.kind, view, summary_grad,
                       unit_grads[level]);
}

std::vector<Vector> backward_pyramid(const PyramidTrace& trace, const CompositionParams& params,
                                     std::vector<std::vector<Vector>> unit_grads,
                                     CompositionParams& grads) {
  if (unit_grads.size() != trace.num_levels()) {
    throw ShapeError("backward_pyramid: gradient buffers do not match the trace");
  }
  const std::size_t d = params.dim();
  Vector pre_grad(d);
  Vector gate_grad(3);
  for (std::size_t t = trace.num_levels() - 1; t >= 1; --t) {
    const auto& below = trace.levels[t - 1];
    auto& below_grads = unit_grads[t - 1];
    for (std::size_t j = 0; j < trace.levels[t].size(); ++j) {
      const Vector& delta = unit_grads[t][j];
      const NodeCache& node = trace.nodes[t][j];
      const Vector& left = below[j];
      const Vector& right = below[j + 1];
      Vector& left_grad = below_grads[j];
      Vector& right_grad = below_grads[j + 1];
      const auto& w = node.gates;

      // Identity paths through the convex combination.
      axpy(w.left, delta, left_grad);
      axpy(w.right, delta, right_grad);

      // Composed candidate: tanh(W_L l + W_R r + b_W).
      for (std::size_t i = 0; i < d; ++i) pre_grad[i] = w.composed * delta[i] * node.derivative[i];
      add_outer(grads.w_left, pre_grad, left);
      add_outer(grads.w_right, pre_grad, right);
      axpy(1.0, pre_grad, grads.b_w);
      add_matvec_transposed(params.w_left, pre_grad, left_grad);
      add_matvec_transposed(params.w_right, pre_grad, right_grad);

      if (node.gates_forced) continue;

      // Gate softmax: the weights depend on both children.
      const Real dw[3] = {dot(delta, left), dot(delta, right), dot(delta, node.candidate)};
      const Real wv[3] = {w.left, w.right, w.composed};
      const Real mean = wv[0] * dw[0] + wv[1] * dw[1] + wv[2] * dw[2];
      for (std::size_t k = 0; k < 3; ++k) gate_grad[k] = wv[k] * (dw[k] - mean);
      add_outer(grads.g_left, gate_grad, left);
      add_outer(grads.g_right, gate_grad, right);
      axpy(1.0, gate_grad, grads.b_g);
      add_matvec_transposed(params.g_left, gate_grad, left_grad);
      add_matvec_transposed(params.g_right, gate_grad, right_grad);
    }
  }
  return std::move(unit_grads.front());
}

}  // namespace adasent
