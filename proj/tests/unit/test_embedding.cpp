#include <gtest/gtest.h>

#include <random>

#include "adasent/embedding.hpp"
#include "adasent/error.hpp"
#include "oracles.hpp"

using namespace adasent;

TEST(LoadEmbeddings, ThreeTokensAddOov) {
  fixture::TempDir dir("emb");
  const auto p = dir.write("e.txt", "a 1 2\nb 3 4\nc 5 6\n");
  const auto e = load_embeddings(p, 2);
  EXPECT_EQ(e.vocab.size(), 4u);
  EXPECT_EQ(e.table.vectors.rows(), 2u);
  EXPECT_EQ(e.table.vectors.cols(), 4u);
  const auto oov = e.vocab.oov_index();
  EXPECT_EQ(oov, 3u);
  EXPECT_DOUBLE_EQ(e.table.vectors(0, oov), 3.0);
  EXPECT_DOUBLE_EQ(e.table.vectors(1, oov), 4.0);
  EXPECT_EQ(e.vocab.lookup("zebra"), oov);
  EXPECT_DOUBLE_EQ(e.table.vectors(1, e.vocab.lookup("b")), 4.0);
}

TEST(LoadEmbeddings, EmptyFileIsAnError) {
  fixture::TempDir dir("emb");
  EXPECT_THROW(load_embeddings(dir.write("e.txt", ""), 2), ParseError);
}

TEST(LoadEmbeddings, DimensionMismatchNamesLine) {
  fixture::TempDir dir("emb");
  const auto p = dir.write("e.txt", "a 1 2\nb 3 4 5\n");
  try {
    load_embeddings(p, 2);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LoadEmbeddings, MissingFileIsInputError) {
  EXPECT_THROW(load_embeddings("/nonexistent/vectors.txt", 50), InputError);
}

TEST(LoadEmbeddings, HeaderSkippedAndDuplicatesKeepFirst) {
  fixture::TempDir dir("emb");
  const auto p = dir.write("e.txt", "3 2\na 1 2\nb 3 4\na 9 9\n");
  const auto e = load_embeddings(p, 2);
  EXPECT_TRUE(e.had_header);
  EXPECT_EQ(e.vocab.size(), 3u);
  EXPECT_DOUBLE_EQ(e.table.vectors(0, e.vocab.lookup("a")), 1.0);
  EXPECT_FALSE(e.warnings.empty());
}

TEST(LoadEmbeddings, KeepFilterRestrictsVocabulary) {
  fixture::TempDir dir("emb");
  const auto p = dir.write("e.txt", "a 1 2\nb 3 4\nc 5 6\n");
  const std::unordered_set<std::string> keep{"c"};
  const auto e = load_embeddings(p, 2, &keep);
  EXPECT_EQ(e.vocab.size(), 2u);
  EXPECT_TRUE(e.vocab.contains("c"));
  EXPECT_FALSE(e.vocab.contains("a"));
}

TEST(Vocabulary, BijectiveAndDense) {
  Vocabulary v;
  EXPECT_TRUE(v.add("x"));
  EXPECT_TRUE(v.add("y"));
  EXPECT_FALSE(v.add("x"));
  v.seal();
  for (TokenId i = 0; i < v.size(); ++i) EXPECT_EQ(v.lookup(v.word(i)), i);
}

TEST(Tokenize, Examples) {
  EXPECT_EQ(tokenize("The cat sat."), (std::vector<std::string>{"the", "cat", "sat", "."}));
  EXPECT_EQ(tokenize("on the mat"), (std::vector<std::string>{"on", "the", "mat"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize(" \t  ").empty());
  EXPECT_EQ(tokenize("\"Wow!\" it's"),
            (std::vector<std::string>{"\"", "wow", "!", "\"", "it's"}));
}

TEST(Tokenize, TruncatesTail) {
  Vocabulary v;
  v.seal();
  std::vector<std::string> many(70, "w");
  EXPECT_EQ(lookup_tokens(many, v).size(), kDefaultMaxTokens);
  EXPECT_EQ(lookup_tokens(many, v, 5).size(), 5u);
}

TEST(EmbedAndProject, IdentityProjectionReturnsWordVectors) {
  std::mt19937_64 rng(1);
  const auto table = fixture::random_table(3, 5, rng);
  const auto out = embed_and_project(std::vector<TokenId>{4, 0, 2}, table, Projection::identity(3));
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0], table.vectors.column(4));
  EXPECT_EQ(out[2], table.vectors.column(2));
}

TEST(EmbedAndProject, LengthPreservedAndEmptyRejected) {
  std::mt19937_64 rng(2);
  const auto table = fixture::random_table(2, 3, rng);
  const auto proj = Projection::random(4, 2, rng);
  EXPECT_EQ(embed_and_project(std::vector<TokenId>{1}, table, proj).size(), 1u);
  EXPECT_EQ(embed_and_project(std::vector<TokenId>{1}, table, proj)[0].dim(), 4u);
  EXPECT_THROW(embed_and_project(std::vector<TokenId>{}, table, proj), EmptySentenceError);
}

TEST(Projection, RandomRespectsBoundsAndShape) {
  std::mt19937_64 rng(4);
  const auto p = Projection::random(8, 3, rng);
  EXPECT_EQ(p.output_dim(), 8u);
  EXPECT_EQ(p.input_dim(), 3u);
  const double bound = std::sqrt(6.0 / 11.0);
  for (double v : p.matrix.values()) EXPECT_LE(std::abs(v), bound);
  EXPECT_THROW(Projection::random(2, 3, rng), Error);
}

TEST(Factorization, ParameterCounts) {
  const auto c = factorization_counts(20000, 50, 200);
  EXPECT_EQ(c.factorized, 200u * 50u + 50u * 20000u);
  EXPECT_EQ(c.direct, 200u * 20000u);
  EXPECT_LT(c.factorized, c.direct);
}
