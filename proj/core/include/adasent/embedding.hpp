#pragma once

#include <cstddef>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "adasent/numerics.hpp"

namespace adasent {

using TokenId = std::size_t;

/// Word <-> index bijection. The OOV entry is always the last index.
class Vocabulary {
 public:
  static constexpr std::string_view kOovToken = "<OOV>";

  Vocabulary() = default;

  /// Returns false (and leaves the vocabulary unchanged) when `word` is
  /// already present or is the reserved OOV token.
  bool add(const std::string& word);

  /// Appends the OOV entry; must be called exactly once, after all words.
  void seal();

  bool sealed() const noexcept { return sealed_; }
  std::size_t size() const noexcept { return words_.size(); }
  TokenId oov_index() const;

  /// Index of `word`, or the OOV index.
  TokenId lookup(std::string_view word) const;
  bool contains(std::string_view word) const;
  const std::string& word(TokenId id) const { return words_.at(id); }
  const std::vector<std::string>& words() const noexcept { return words_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::unordered_map<std::string, TokenId, Hash, std::equal_to<>> index_;
  std::vector<std::string> words_;
  bool sealed_ = false;
};

/// Word vectors U, one column per vocabulary entry (d x V).
struct EmbeddingTable {
  Matrix vectors;
  bool trainable = true;

  std::size_t dim() const noexcept { return vectors.rows(); }
  std::size_t vocab_size() const noexcept { return vectors.cols(); }
};

/// Linear map U' from word space (d) into pyramid space (D), D >= d.
struct Projection {
  Matrix matrix;

  std::size_t input_dim() const noexcept { return matrix.cols(); }
  std::size_t output_dim() const noexcept { return matrix.rows(); }

  /// Uniform in +-sqrt(6 / (D + d)). Throws InvalidInputError if D < d.
  static Projection random(std::size_t output_dim, std::size_t input_dim, std::mt19937_64& rng);
  static Projection identity(std::size_t dim);
};

struct LoadedEmbeddings {
  Vocabulary vocab;
  EmbeddingTable table;
  std::vector<std::string> warnings;
  bool had_header = false;
};

/// Reads `token v1 ... vd` lines. An optional leading `count dim` header is
/// skipped. When `keep` is given, only those tokens are retained (the OOV
/// vector is still the mean over every vector in the file).
LoadedEmbeddings load_embeddings(const std::filesystem::path& path, std::size_t expected_dim,
                                 const std::unordered_set<std::string>* keep = nullptr);

/// Lowercases ASCII, splits on whitespace and peels leading/trailing ASCII
/// punctuation off each chunk as single-character tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Default cap on tokens per sentence; longer inputs are truncated.
inline constexpr std::size_t kDefaultMaxTokens = 60;

std::vector<TokenId> lookup_tokens(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                                   std::size_t max_tokens = kDefaultMaxTokens);

/// h1_j = U' U x_j for every token id. Throws EmptySentenceError on empty input.
std::vector<Vector> embed_and_project(const std::vector<TokenId>& ids, const EmbeddingTable& table,
                                      const Projection& proj);

/// Convenience overload doing tokenization lookups first.
std::vector<Vector> embed_and_project(const std::vector<std::string>& tokens,
                                      const Vocabulary& vocab, const EmbeddingTable& table,
                                      const Projection& proj);

/// Trainable parameter count of the factorized table U'U versus a direct
/// D x V table.
struct FactorizationCounts {
  std::size_t factorized;
  std::size_t direct;
};
FactorizationCounts factorization_counts(std::size_t vocab_size, std::size_t word_dim,
                                         std::size_t pyramid_dim);

}  // namespace adasent
