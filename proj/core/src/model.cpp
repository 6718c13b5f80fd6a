#include "adasent/model.hpp"

#include <algorithm>
#include <string>

#include "adasent/error.hpp"

namespace adasent {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kAdaSent: return "adasent";
    case ModelKind::kGrConv: return "grconv";
    case ModelKind::kCbow: return "cbow";
    case ModelKind::kRnn: return "rnn";
    case ModelKind::kBrnn: return "brnn";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (ModelKind kind : kAllModelKinds) {
    if (to_string(kind) == name) return kind;
  }
  throw InvalidInputError("unknown model kind '" + std::string(name) +
                          "' (expected adasent, grconv, cbow, rnn or brnn)");
}

bool ModelParams::uses_projection() const noexcept {
  return config.kind != ModelKind::kCbow || config.project_words;
}

std::size_t ModelParams::representation_dim() const noexcept {
  if (!uses_projection()) return word_dim();
  return config.kind == ModelKind::kBrnn ? 2 * config.pyramid_dim : config.pyramid_dim;
}

ModelParams ModelParams::create(const ModelConfig& config, EmbeddingTable embeddings,
                                std::mt19937_64& rng) {
  if (config.num_classes < 2) throw InvalidInputError("need at least 2 classes");
  if (config.hidden_dim == 0) throw InvalidInputError("hidden width must be >= 1");
  if (embeddings.dim() == 0 || embeddings.vocab_size() == 0) {
    throw InvalidInputError("embedding table is empty");
  }
  ModelParams p;
  p.config = config;
  p.embeddings = std::move(embeddings);
  p.embeddings.trainable = config.fine_tune_embeddings;
  const std::size_t d = p.word_dim();
  const std::size_t D = config.pyramid_dim;
  if (p.uses_projection()) p.projection = Projection::random(D, d, rng);
  switch (config.kind) {
    case ModelKind::kAdaSent:
      p.composition = CompositionParams::random(D, rng);
      p.gating = GatingParams::zeros(D);
      break;
    case ModelKind::kGrConv:
      p.composition = CompositionParams::random(D, rng);
      break;
    case ModelKind::kRnn:
      p.forward_rnn = RnnParams::random(D, D, rng);
      break;
    case ModelKind::kBrnn:
      p.forward_rnn = RnnParams::random(D, D, rng);
      p.backward_rnn = RnnParams::random(D, D, rng);
      break;
    case ModelKind::kCbow:
      break;
  }
  p.classifier =
      ClassifierParams::random(p.representation_dim(), config.hidden_dim, config.num_classes, rng);
  return p;
}

namespace {

Matrix zeros_of(const Matrix& m) { return Matrix(m.rows(), m.cols()); }
Vector zeros_of(const Vector& v) { return Vector(v.dim()); }

template <typename View, typename Params>
std::vector<View> collect(Params& p, TensorSet set) {
  std::vector<View> out;
  auto add_m = [&out](const char* name, auto& m) {
    out.push_back(View{name, m.values(), m.rows(), m.cols()});
  };
  auto add_v = [&out](const char* name, auto& v) {
    out.push_back(View{name, v.values(), v.dim(), 1});
  };
  if (set == TensorSet::kAll || p.embeddings.trainable) add_m("embeddings", p.embeddings.vectors);
  if (p.uses_projection()) add_m("projection", p.projection.matrix);
  const ModelKind kind = p.config.kind;
  if (kind == ModelKind::kAdaSent || kind == ModelKind::kGrConv) {
    add_m("w_left", p.composition.w_left);
    add_m("w_right", p.composition.w_right);
    add_v("b_w", p.composition.b_w);
    add_m("g_left", p.composition.g_left);
    add_m("g_right", p.composition.g_right);
    add_v("b_g", p.composition.b_g);
  }
  if (kind == ModelKind::kRnn || kind == ModelKind::kBrnn) {
    add_m("rnn_input", p.forward_rnn.input);
    add_m("rnn_recurrent", p.forward_rnn.recurrent);
    add_v("rnn_bias", p.forward_rnn.bias);
  }
  if (kind == ModelKind::kBrnn) {
    add_m("rnn_rev_input", p.backward_rnn.input);
    add_m("rnn_rev_recurrent", p.backward_rnn.recurrent);
    add_v("rnn_rev_bias", p.backward_rnn.bias);
  }
  add_m("clf_w_hidden", p.classifier.w_hidden);
  add_v("clf_b_hidden", p.classifier.b_hidden);
  add_m("clf_w_out", p.classifier.w_out);
  add_v("clf_b_out", p.classifier.b_out);
  if (kind == ModelKind::kAdaSent) {
    add_v("gate_score", p.gating.score);
    out.push_back(View{"gate_bias", {&p.gating.bias, 1}, 1, 1});
  }
  return out;
}

}  // namespace

ModelParams ModelParams::zeros_like() const {
  ModelParams z;
  z.config = config;
  z.embeddings = {zeros_of(embeddings.vectors), embeddings.trainable};
  z.projection = {zeros_of(projection.matrix)};
  z.composition = {zeros_of(composition.w_left), zeros_of(composition.w_right),
                   zeros_of(composition.b_w),    zeros_of(composition.g_left),
                   zeros_of(composition.g_right), zeros_of(composition.b_g)};
  z.forward_rnn = {zeros_of(forward_rnn.input), zeros_of(forward_rnn.recurrent),
                   zeros_of(forward_rnn.bias)};
  z.backward_rnn = {zeros_of(backward_rnn.input), zeros_of(backward_rnn.recurrent),
                    zeros_of(backward_rnn.bias)};
  z.classifier = {zeros_of(classifier.w_hidden), zeros_of(classifier.b_hidden),
                  zeros_of(classifier.w_out), zeros_of(classifier.b_out)};
  z.gating = {zeros_of(gating.score), 0.0};
  return z;
}

std::vector<TensorView> tensors(ModelParams& params, TensorSet set) {
  return collect<TensorView>(params, set);
}

std::vector<ConstTensorView> tensors(const ModelParams& params, TensorSet set) {
  return collect<ConstTensorView>(params, set);
}

void Gradients::clear() {
  for (auto& t : tensors(values, TensorSet::kAll)) std::fill(t.values.begin(), t.values.end(), 0.0);
}

std::vector<Vector> lookup_columns(const EmbeddingTable& table, const std::vector<TokenId>& ids) {
  std::vector<Vector> out;
  out.reserve(ids.size());
  for (TokenId id : ids) out.push_back(table.vectors.column(id));
  return out;
}

ForwardPass forward(const ModelParams& params, const std::vector<TokenId>& ids,
                    const ForwardOptions& options) {
  if (ids.empty()) throw EmptySentenceError();
  ForwardPass pass;
  pass.kind = params.config.kind;
  pass.ids = ids;
  if (params.uses_projection()) {
    pass.inputs = embed_and_project(ids, params.embeddings, params.projection);
  } else {
    pass.inputs = lookup_columns(params.embeddings, ids);
  }

  switch (pass.kind) {
    case ModelKind::kAdaSent: {
      pass.pyramid = forward_pyramid(pass.inputs, params.composition, {options.forced_gates});
      pass.hierarchy = build_hierarchy(pass.pyramid, params.config.pooling);
      std::optional<BeliefVector> beliefs = options.forced_beliefs;
      if (options.beliefs_at_root) {
        beliefs = Vector(pass.hierarchy.size());
        (*beliefs)[pass.hierarchy.size() - 1] = 1.0;
      }
      pass.mixture = mixture_predict(pass.hierarchy, params.classifier, params.gating, beliefs);
      pass.distribution = pass.mixture.distribution;
      return pass;
    }
    case ModelKind::kGrConv:
      pass.pyramid = forward_pyramid(pass.inputs, params.composition, {options.forced_gates});
      pass.head = classify_level_traced(pass.pyramid.top(), params.classifier);
      break;
    case ModelKind::kCbow:
      pass.pooled = pool_units(pass.inputs, params.config.pooling);
      pass.head = classify_level_traced(pass.pooled.value, params.classifier);
      break;
    case ModelKind::kRnn:
      pass.forward_rnn = rnn_forward(pass.inputs, params.forward_rnn);
      pass.head = classify_level_traced(pass.forward_rnn.states.back(), params.classifier);
      break;
    case ModelKind::kBrnn: {
      pass.forward_rnn = rnn_forward(pass.inputs, params.forward_rnn);
      std::vector<Vector> reversed(pass.inputs.rbegin(), pass.inputs.rend());
      pass.backward_rnn = rnn_forward(reversed, params.backward_rnn);
      pass.head = classify_level_traced(
          concat(pass.forward_rnn.states.back(), pass.backward_rnn.states.back()),
          params.classifier);
      break;
    }
  }
  pass.distribution = pass.head.probs;
  return pass;
}

Vector selected_representation(const ForwardPass& pass) {
  if (pass.kind != ModelKind::kAdaSent) return pass.head.input;
  const auto& beliefs = pass.mixture.beliefs.values();
  const auto best = std::max_element(beliefs.begin(), beliefs.end()) - beliefs.begin();
  return pass.hierarchy.summaries[static_cast<std::size_t>(best)];
}

void backward(const ModelParams& params, const ForwardPass& pass, std::size_t label, Real scale,
              Gradients& grads) {
  auto& g = grads.values;
  if (label >= pass.distribution.dim()) throw InvalidLabelError("label out of range");
  Vector dist_grad(pass.distribution.dim());
  const Real p = pass.distribution[label];
  if (p > kProbabilityFloor) dist_grad[label] = -scale / p;

  std::vector<Vector> input_grads;
  switch (pass.kind) {
    case ModelKind::kAdaSent: {
      const auto summary_grads =
          mixture_backward(pass.mixture, pass.hierarchy, params.classifier, params.gating,
                           dist_grad, g.classifier, g.gating);
      auto unit_grads = zero_unit_grads(pass.pyramid);
      for (std::size_t t = 0; t < summary_grads.size(); ++t) {
        scatter_pooled_gradient(pass.pyramid, pass.hierarchy, t, summary_grads[t], unit_grads);
      }
      input_grads = backward_pyramid(pass.pyramid, params.composition, std::move(unit_grads),
                                     g.composition);
      break;
    }
    case ModelKind::kGrConv: {
      const Vector top_grad = classifier_backward(pass.head, params.classifier, dist_grad,
                                                  g.classifier);
      auto unit_grads = zero_unit_grads(pass.pyramid);
      unit_grads.back().front() = top_grad;
      input_grads = backward_pyramid(pass.pyramid, params.composition, std::move(unit_grads),
                                     g.composition);
      break;
    }
    case ModelKind::kCbow: {
      const Vector pooled_grad = classifier_backward(pass.head, params.classifier, dist_grad,
                                                     g.classifier);
      input_grads.assign(pass.inputs.size(), Vector(pooled_grad.dim()));
      scatter_pooled_units(pass.inputs.size(), params.config.pooling, pass.pooled, pooled_grad,
                           input_grads);
      break;
    }
    case ModelKind::kRnn: {
      const Vector state_grad = classifier_backward(pass.head, params.classifier, dist_grad,
                                                    g.classifier);
      input_grads = rnn_backward(pass.forward_rnn, params.forward_rnn, state_grad, g.forward_rnn);
      break;
    }
    case ModelKind::kBrnn: {
      const Vector joint_grad = classifier_backward(pass.head, params.classifier, dist_grad,
                                                    g.classifier);
      const std::size_t D = params.config.pyramid_dim;
      Vector fwd_grad(D);
      Vector bwd_grad(D);
      for (std::size_t i = 0; i < D; ++i) {
        fwd_grad[i] = joint_grad[i];
        bwd_grad[i] = joint_grad[D + i];
      }
      input_grads = rnn_backward(pass.forward_rnn, params.forward_rnn, fwd_grad, g.forward_rnn);
      const auto reversed_grads =
          rnn_backward(pass.backward_rnn, params.backward_rnn, bwd_grad, g.backward_rnn);
      const std::size_t T = input_grads.size();
      for (std::size_t j = 0; j < T; ++j) input_grads[j] += reversed_grads[T - 1 - j];
      break;
    }
  }

  // Word level: h1_j = U' U[:, id_j].
  const bool projected = params.uses_projection();
  for (std::size_t j = 0; j < pass.ids.size(); ++j) {
    const TokenId id = pass.ids[j];
    const Vector& upstream = input_grads[j];
    if (projected) {
      const Vector word = params.embeddings.vectors.column(id);
      add_outer(g.projection.matrix, upstream, word);
    }
    if (!params.embeddings.trainable) continue;
    const Vector word_grad =
        projected ? matvec_transposed(params.projection.matrix, upstream) : upstream;
    for (std::size_t k = 0; k < word_grad.dim(); ++k) g.embeddings.vectors(k, id) += word_grad[k];
  }
}

}  // namespace adasent
