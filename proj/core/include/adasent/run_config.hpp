#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "adasent/model.hpp"
#include "adasent/training.hpp"

namespace adasent {

/// Environment variable naming the default data directory; relative dataset
/// and embedding paths that do not exist are resolved against it.
inline constexpr const char* kDataDirEnv = "ADASENT_DATA_DIR";

/// Everything a run needs. Flat `key=value` text form; see keys().
struct RunConfig {
  ModelKind model = ModelKind::kAdaSent;
  std::string dataset = "custom";
  std::string data;        ///< normalized dataset file (or directory for trec)
  std::string embeddings;  ///< pretrained vectors
  std::size_t embedding_dim = 50;
  std::size_t dim = 50;     ///< D, pyramid / hidden state width
  std::size_t hidden = 100; ///< classifier hidden width
  PoolingKind pooling = PoolingKind::kAverage;
  Real lambda = 1e-4;
  Real learning_rate = 0.05;
  Real clip = 5.0;
  std::size_t batch = 32;
  std::size_t epochs = 20;
  std::uint64_t seed = 1;
  std::string out = "run";
  std::size_t max_tokens = kDefaultMaxTokens;
  bool fine_tune = true;
  bool project = true;
  double valid_fraction = 0.1;
  std::size_t restarts = 1;
  std::size_t folds = 10;  ///< how many of the 10 CV folds to run

  /// Recognized keys, in echo order.
  static const std::vector<std::string>& keys();

  /// Throws InputError for unknown keys or unparsable values.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;

  /// Applies `key=value` lines; `#` starts a comment.
  void merge_file(const std::filesystem::path& path);
  void merge_text(std::string_view text, const std::string& source);

  /// Every key on its own line.
  std::string echo() const;

  /// Throws InputError when an invariant is violated (lambda < 0, ...).
  void validate() const;

  TrainConfig train_config(std::size_t num_classes) const;
};

/// Resolves a relative path against ADASENT_DATA_DIR when it does not exist
/// as given.
std::filesystem::path resolve_data_path(const std::string& path);

}  // namespace adasent
