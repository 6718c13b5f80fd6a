#include "adasent/embedding.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "adasent/error.hpp"

namespace adasent {

bool Vocabulary::add(const std::string& word) {
  if (sealed_) throw Error("Vocabulary::add after seal()");
  if (word == kOovToken || index_.contains(word)) return false;
  index_.emplace(word, words_.size());
  words_.push_back(word);
  return true;
}

void Vocabulary::seal() {
  if (sealed_) throw Error("Vocabulary::seal called twice");
  index_.emplace(std::string(kOovToken), words_.size());
  words_.emplace_back(kOovToken);
  sealed_ = true;
}

TokenId Vocabulary::oov_index() const {
  if (!sealed_) throw Error("Vocabulary has no OOV entry yet");
  return words_.size() - 1;
}

TokenId Vocabulary::lookup(std::string_view word) const {
  auto it = index_.find(word);
  return it == index_.end() ? oov_index() : it->second;
}

bool Vocabulary::contains(std::string_view word) const { return index_.find(word) != index_.end(); }

Projection Projection::random(std::size_t output_dim, std::size_t input_dim,
                              std::mt19937_64& rng) {
  if (input_dim == 0 || output_dim < input_dim) {
    throw InvalidInputError("projection requires D >= d >= 1 (got D=" +
                            std::to_string(output_dim) + ", d=" + std::to_string(input_dim) + ")");
  }
  const Real bound = std::sqrt(6.0 / static_cast<Real>(output_dim + input_dim));
  std::uniform_real_distribution<Real> dist(-bound, bound);
  Projection p{Matrix(output_dim, input_dim)};
  for (auto& x : p.matrix.values()) x = dist(rng);
  return p;
}

Projection Projection::identity(std::size_t dim) { return Projection{Matrix::identity(dim)}; }

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_real(std::string_view s, Real& out) {
  // strtod accepts the exponent and hex forms that pretrained dumps use.
  std::string buf(s);
  char* end = nullptr;
  out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size() && std::isfinite(out);
}

bool is_unsigned_integer(std::string_view s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

LoadedEmbeddings load_embeddings(const std::filesystem::path& path, std::size_t expected_dim,
                                 const std::unordered_set<std::string>* keep) {
  if (expected_dim == 0) throw InvalidInputError("embedding dimension must be >= 1");
  std::ifstream in(path);
  if (!in) throw InputError("cannot open embedding file: " + path.string());

  LoadedEmbeddings result;
  std::vector<Real> columns;  // column-major staging, expected_dim per word
  std::vector<Real> mean(expected_dim, 0.0);
  std::size_t total_vectors = 0;
  std::string line;
  std::size_t line_no = 0;
  std::unordered_set<std::string> seen;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (line_no == 1 && fields.size() == 2 && expected_dim != 1 &&
        is_unsigned_integer(fields[0]) && is_unsigned_integer(fields[1])) {
      result.had_header = true;
      continue;
    }
    if (fields.size() != expected_dim + 1) {
      throw ParseError(path.string(), line_no,
                       "expected " + std::to_string(expected_dim) + " values, found " +
                           std::to_string(fields.size() - 1));
    }
    std::vector<Real> values(expected_dim);
    for (std::size_t k = 0; k < expected_dim; ++k) {
      if (!parse_real(fields[k + 1], values[k])) {
        throw ParseError(path.string(), line_no,
                         "invalid number '" + std::string(fields[k + 1]) + "'");
      }
    }
    const std::string token(fields[0]);
    if (!seen.insert(token).second) {
      result.warnings.push_back(path.string() + ":" + std::to_string(line_no) +
                                ": duplicate token '" + token + "' ignored");
      continue;
    }
    for (std::size_t k = 0; k < expected_dim; ++k) mean[k] += values[k];
    ++total_vectors;
    if (keep != nullptr && !keep->contains(token)) continue;
    if (!result.vocab.add(token)) {
      result.warnings.push_back(path.string() + ":" + std::to_string(line_no) + ": token '" +
                                token + "' is reserved and was skipped");
      continue;
    }
    columns.insert(columns.end(), values.begin(), values.end());
  }
  if (total_vectors == 0) throw ParseError("embedding file has no vectors: " + path.string());

  result.vocab.seal();
  const std::size_t vocab_size = result.vocab.size();
  result.table.vectors = Matrix(expected_dim, vocab_size);
  for (std::size_t w = 0; w + 1 < vocab_size; ++w) {
    for (std::size_t k = 0; k < expected_dim; ++k) {
      result.table.vectors(k, w) = columns[w * expected_dim + k];
    }
  }
  for (std::size_t k = 0; k < expected_dim; ++k) {
    result.table.vectors(k, vocab_size - 1) = mean[k] / static_cast<Real>(total_vectors);
  }
  return result;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  auto is_punct = [](char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; };
  for (std::string_view chunk : split_ws(text)) {
    std::size_t begin = 0;
    std::size_t end = chunk.size();
    while (begin < end && is_punct(chunk[begin])) {
      tokens.emplace_back(1, chunk[begin]);
      ++begin;
    }
    std::size_t trail = end;
    while (trail > begin && is_punct(chunk[trail - 1])) --trail;
    if (trail > begin) {
      std::string word(chunk.substr(begin, trail - begin));
      for (auto& c : word) {
        if (static_cast<unsigned char>(c) < 0x80) {
          c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
      }
      tokens.push_back(std::move(word));
    }
    for (std::size_t k = trail; k < end; ++k) tokens.emplace_back(1, chunk[k]);
  }
  return tokens;
}

std::vector<TokenId> lookup_tokens(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                                   std::size_t max_tokens) {
  std::vector<TokenId> ids;
  const std::size_t n = std::min(tokens.size(), max_tokens);
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids.push_back(vocab.lookup(tokens[i]));
  return ids;
}

std::vector<Vector> embed_and_project(const std::vector<TokenId>& ids, const EmbeddingTable& table,
                                      const Projection& proj) {
  if (ids.empty()) throw EmptySentenceError();
  if (proj.input_dim() != table.dim()) {
    throw ShapeError("projection input dim " + std::to_string(proj.input_dim()) +
                     " != word dim " + std::to_string(table.dim()));
  }
  std::vector<Vector> out;
  out.reserve(ids.size());
  for (TokenId id : ids) {
    if (id >= table.vocab_size()) throw IndexError("token id out of range");
    out.push_back(matvec(proj.matrix, table.vectors.column(id)));
  }
  return out;
}

std::vector<Vector> embed_and_project(const std::vector<std::string>& tokens,
                                      const Vocabulary& vocab, const EmbeddingTable& table,
                                      const Projection& proj) {
  return embed_and_project(lookup_tokens(tokens, vocab), table, proj);
}

FactorizationCounts factorization_counts(std::size_t vocab_size, std::size_t word_dim,
                                         std::size_t pyramid_dim) {
  return {pyramid_dim * word_dim + word_dim * vocab_size, pyramid_dim * vocab_size};
}

}  // namespace adasent
