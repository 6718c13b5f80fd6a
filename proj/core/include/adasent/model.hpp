#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adasent/baselines.hpp"
#include "adasent/embedding.hpp"
#include "adasent/ensemble.hpp"
#include "adasent/numerics.hpp"
#include "adasent/pyramid.hpp"

namespace adasent {

/// Probabilities are floored here before taking logs.
inline constexpr Real kProbabilityFloor = 1e-12;

enum class ModelKind { kAdaSent, kGrConv, kCbow, kRnn, kBrnn };

inline constexpr ModelKind kAllModelKinds[] = {ModelKind::kAdaSent, ModelKind::kGrConv,
                                               ModelKind::kCbow, ModelKind::kRnn,
                                               ModelKind::kBrnn};

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

struct ModelConfig {
  ModelKind kind = ModelKind::kAdaSent;
  std::size_t pyramid_dim = 50;  ///< D
  std::size_t hidden_dim = 100;  ///< H, classifier hidden width
  std::size_t num_classes = 2;   ///< K
  PoolingKind pooling = PoolingKind::kAverage;
  bool fine_tune_embeddings = true;
  /// Only cBoW may skip U' and pool raw word vectors.
  bool project_words = true;
  std::size_t max_tokens = kDefaultMaxTokens;
};

/// Every tensor any model kind may use. Tensors a kind does not use stay
/// empty.
struct ModelParams {
  ModelConfig config;
  EmbeddingTable embeddings;
  Projection projection;
  CompositionParams composition;
  RnnParams forward_rnn;
  RnnParams backward_rnn;
  ClassifierParams classifier;
  GatingParams gating;

  /// Random initialization around the given (pretrained) word vectors.
  static ModelParams create(const ModelConfig& config, EmbeddingTable embeddings,
                            std::mt19937_64& rng);

  /// Same shapes, all zeros.
  ModelParams zeros_like() const;

  std::size_t word_dim() const noexcept { return embeddings.dim(); }
  bool uses_projection() const noexcept;
  /// Dimension of the vectors fed to the classifier.
  std::size_t representation_dim() const noexcept;
};

struct TensorView {
  std::string name;
  std::span<Real> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

struct ConstTensorView {
  std::string name;
  std::span<const Real> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

enum class TensorSet {
  kTrainable,  ///< what the optimizer updates (U only when fine-tuning)
  kAll,        ///< everything a checkpoint stores
};

/// Tensors used by `params.config.kind`, in a fixed order.
std::vector<TensorView> tensors(ModelParams& params, TensorSet set = TensorSet::kTrainable);
std::vector<ConstTensorView> tensors(const ModelParams& params,
                                     TensorSet set = TensorSet::kTrainable);

/// Gradient buffers, shape-congruent with the parameters.
struct Gradients {
  ModelParams values;

  static Gradients zeros_like(const ModelParams& params) { return {params.zeros_like()}; }
  void clear();
};

struct ForwardOptions {
  /// AdaSent only: replaces the gating network output.
  std::optional<BeliefVector> forced_beliefs;
  /// AdaSent only: shorthand for beliefs (0, ..., 0, 1).
  bool beliefs_at_root = false;
  /// AdaSent / GrConv: forces every pyramid gate.
  std::optional<GateCoefficients> forced_gates;
};

/// Everything one sentence's forward pass produces, kept for backward.
struct ForwardPass {
  ModelKind kind = ModelKind::kAdaSent;
  std::vector<TokenId> ids;
  std::vector<Vector> inputs;  ///< projected h1 (or raw words for unprojected cBoW)
  PyramidTrace pyramid;
  Hierarchy hierarchy;
  MixturePrediction mixture;
  PooledLevel pooled;
  RnnTrace forward_rnn;
  RnnTrace backward_rnn;
  ClassifierTrace head;
  Vector distribution;
};

ForwardPass forward(const ModelParams& params, const std::vector<TokenId>& ids,
                    const ForwardOptions& options = {});

/// The fixed-length vector the classifier saw; for AdaSent the level
/// summary with the largest belief (lowest level on ties).
Vector selected_representation(const ForwardPass& pass);

/// Accumulates scale * dL/dtheta for L = -log p(label) into `grads`.
void backward(const ModelParams& params, const ForwardPass& pass, std::size_t label, Real scale,
              Gradients& grads);

/// Rows of the embedding matrix touched by a list of token ids.
std::vector<Vector> lookup_columns(const EmbeddingTable& table, const std::vector<TokenId>& ids);

}  // namespace adasent
