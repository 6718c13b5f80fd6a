#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "adasent/error.hpp"
#include "adasent_tools/commands.hpp"
#include "oracles.hpp"

using namespace adasent;

namespace {

/// Small separable text dataset with a matching embedding file.
struct Corpus {
  fixture::TempDir dir{"cli"};
  std::filesystem::path data;
  std::filesystem::path embeddings;

  explicit Corpus(std::size_t n = 60) {
    const std::vector<std::string> pos{"good", "great", "fine", "nice"};
    const std::vector<std::string> neg{"bad", "awful", "poor", "dull"};
    const std::vector<std::string> fill{"the", "movie", "was", "a", "plot", "very"};
    std::mt19937_64 rng(17);
    std::ostringstream d;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t label = i % 2;
      const auto& cues = label ? pos : neg;
      std::vector<std::string> words{fill[rng() % fill.size()], fill[rng() % fill.size()],
                                     cues[rng() % cues.size()]};
      std::shuffle(words.begin(), words.end(), rng);
      d << label << '\t' << words[0] << ' ' << words[1] << ' ' << words[2] << '\n';
    }
    data = dir.write("data.tsv", d.str());
    std::ostringstream e;
    std::uniform_real_distribution<double> u(-1, 1);
    for (const auto* list : {&pos, &neg, &fill})
      for (const auto& w : *list) {
        e << w;
        for (int k = 0; k < 8; ++k) e << ' ' << u(rng);
        e << '\n';
      }
    embeddings = dir.write("emb.txt", e.str());
  }

  RunConfig config(const std::string& out) const {
    RunConfig c;
    c.data = data.string();
    c.embeddings = embeddings.string();
    c.embedding_dim = 8;
    c.dim = 8;
    c.hidden = 6;
    c.epochs = 4;
    c.batch = 8;
    c.out = (dir.path() / out).string();
    return c;
  }
};

int run_cli(const std::string& args, const std::filesystem::path& stderr_file) {
  const std::string cmd = std::string(ADASENT_CLI_PATH) + " " + args + " >/dev/null 2>" + stderr_file.string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(fixture::read_file(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Cli, BadEmbeddingPathExitsTwo) {
  Corpus corpus;
  const auto err = corpus.dir / "err.txt";
  const int rc = run_cli("train --data " + corpus.data.string() + " --embeddings /no/such/vectors.txt --embedding-dim 8 --dim 8", err);
  EXPECT_EQ(rc, 2);
  EXPECT_NE(fixture::read_file(err).find("/no/such/vectors.txt"), std::string::npos);
}

TEST(Cli, UnknownKeyExitsTwoAndGradcheckPasses) {
  Corpus corpus;
  const auto err = corpus.dir / "err.txt";
  EXPECT_EQ(run_cli("train --set nonsense=1 --data " + corpus.data.string(), err), 2);
  EXPECT_EQ(run_cli("gradcheck --problems 1 --max-length 3", err), 0);
}

TEST(Cli, SyntheticTrainWritesArtifactsAndOverfits) {
  Corpus corpus;
  auto config = corpus.config("train");
  config.epochs = 60;
  config.learning_rate = 0.1;
  std::ostringstream log;
  const auto run = tools::cmd_train(config, log);
  EXPECT_TRUE(std::filesystem::exists(run.checkpoint));
  EXPECT_TRUE(std::filesystem::exists(run.config_echo));
  const auto rows = read_csv(run.metrics);
  ASSERT_EQ(rows.size(), 61u);
  EXPECT_EQ(rows[0][0], "epoch");
  EXPECT_GE(run.result.history.back().train_accuracy, 0.98);
}

TEST(Cli, MetricsAreByteIdenticalAcrossRuns) {
  Corpus corpus;
  std::ostringstream log;
  const auto a = tools::cmd_train(corpus.config("a"), log);
  const auto b = tools::cmd_train(corpus.config("b"), log);
  EXPECT_EQ(fixture::read_file(a.metrics), fixture::read_file(b.metrics));
}

TEST(Cli, ConfigEchoReproducesTheRun) {
  Corpus corpus;
  std::ostringstream log;
  const auto a = tools::cmd_train(corpus.config("a"), log);
  RunConfig again;
  again.merge_file(a.config_echo);
  again.out = (corpus.dir / "again").string();
  const auto b = tools::cmd_train(again, log);
  EXPECT_EQ(fixture::read_file(a.metrics), fixture::read_file(b.metrics));
}

TEST(Cli, CrossvalReportsTenFolds) {
  Corpus corpus;
  auto config = corpus.config("cv");
  config.epochs = 2;
  std::ostringstream log;
  const auto summary = tools::cmd_crossval(config, log);
  ASSERT_EQ(summary.folds.size(), 10u);
  for (const auto& f : summary.folds) {
    EXPECT_GE(f.accuracy, 0.0);
    EXPECT_LE(f.accuracy, 1.0);
    EXPECT_EQ(f.test_size, 6u);
  }
  EXPECT_EQ(read_csv(std::filesystem::path(config.out) / "folds.csv").size(), 11u);
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(config.out) / "summary.csv"));
}

TEST(Cli, BeliefExportRowsAndConsensus) {
  Corpus corpus;
  std::ostringstream log;
  const auto run = tools::cmd_train(corpus.config("t"), log);
  const auto sentences = corpus.dir.write(
      "s.txt", "the movie was good\n\n   \na very very very good movie the plot was a bit dull\nbad\n");
  const auto exported = tools::cmd_inspect_beliefs(run.checkpoint, sentences, corpus.dir / "b", log);
  EXPECT_EQ(exported.rows, 3u);
  EXPECT_EQ(exported.skipped, 2u);
  const auto beliefs = read_csv(exported.beliefs);
  const auto probs = read_csv(exported.level_probs);
  ASSERT_EQ(beliefs.size(), 4u);
  EXPECT_EQ(beliefs[0].size(), 14u);  // line, length, 12 levels
  EXPECT_EQ(beliefs[2][1], "12");
  for (std::size_t r = 1; r < beliefs.size(); ++r) {
    double sum = 0.0;
    double consensus = 0.0;
    for (std::size_t c = 2; c < beliefs[r].size(); ++c) {
      if (beliefs[r][c].empty()) continue;
      const double b = std::stod(beliefs[r][c]);
      sum += b;
      consensus += b * std::stod(probs[r][c + 1]);
    }
    EXPECT_NEAR(sum, 1.0, 1e-6);
    EXPECT_NEAR(consensus, std::stod(probs[r][2]), 1e-12);
  }
}

TEST(Cli, PcaExportAndDegenerateInput) {
  Corpus corpus;
  std::ostringstream log;
  const auto run = tools::cmd_train(corpus.config("t"), log);
  const auto out = corpus.dir / "pca.csv";
  EXPECT_EQ(tools::cmd_export_pca(run.checkpoint, "custom", corpus.data, out, log), 60u);
  const auto rows = read_csv(out);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"x", "y", "label"}));
  EXPECT_EQ(rows.size(), 61u);
  const auto tiny = corpus.dir.write("tiny.tsv", "1\tgood\n0\tbad\n");
  EXPECT_THROW(tools::cmd_export_pca(run.checkpoint, "custom", tiny, out, log), InputError);
}

TEST(Cli, ConvertAndStats) {
  Corpus corpus;
  const auto pos = corpus.dir.write("pos.txt", "good stuff\nnice\n");
  const auto neg = corpus.dir.write("neg.txt", "bad stuff\n");
  tools::ConvertRequest req;
  req.format = "two-file";
  req.positive = pos;
  req.negative = neg;
  req.out = corpus.dir / "out.tsv";
  std::ostringstream log;
  EXPECT_EQ(tools::cmd_convert_dataset(req, log), 3u);
  const auto stats = tools::cmd_stats("custom", req.out, log);
  EXPECT_EQ(stats.size, 3u);
  EXPECT_NEAR(stats.mean_length, 5.0 / 3.0, 1e-12);
}
