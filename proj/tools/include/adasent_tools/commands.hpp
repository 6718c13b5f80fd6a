#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "adasent/checkpoint.hpp"
#include "adasent/data.hpp"
#include "adasent/gradcheck.hpp"
#include "adasent/run_config.hpp"
#include "adasent/training.hpp"

namespace adasent::tools {

/// Dataset plus embeddings restricted to the dataset's vocabulary.
struct PreparedData {
  LoadedDataset dataset;
  LoadedEmbeddings embeddings;
};

PreparedData prepare_data(const RunConfig& config, std::ostream& log);

struct TrainRun {
  TrainResult result;
  Real test_accuracy;  ///< NaN when the protocol has no held-out test set
  std::filesystem::path checkpoint;
  std::filesystem::path metrics;
  std::filesystem::path config_echo;
};

/// Trains one model; writes checkpoint.txt, metrics.csv and config.txt
/// under config.out.
TrainRun cmd_train(const RunConfig& config, std::ostream& log);

struct FoldResult {
  std::size_t restart = 0;
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  Real accuracy = 0.0;
  double seconds = 0.0;
};

struct CrossvalSummary {
  std::vector<FoldResult> folds;
  std::vector<Real> run_accuracies;  ///< one per restart (mean over its folds)
  Real mean = 0.0;
  Real stddev = 0.0;  ///< across restarts, or across folds when restarts == 1
  double wall_seconds = 0.0;
};

/// Writes folds.csv and summary.csv under config.out.
CrossvalSummary cmd_crossval(const RunConfig& config, std::ostream& log);

/// Cross-validation on already prepared data (no files written).
CrossvalSummary crossval(const RunConfig& config, const PreparedData& data, std::ostream& log);

SweepReport cmd_gradcheck(const SweepConfig& sweep, std::ostream& log);

struct BeliefExport {
  std::size_t rows = 0;
  std::size_t skipped = 0;
  std::filesystem::path beliefs;
  std::filesystem::path level_probs;
};

/// One row per sentence: belief scores, padded to the longest sentence; and
/// a companion file with the consensus and per-level p(class 1).
BeliefExport cmd_inspect_beliefs(const std::filesystem::path& checkpoint,
                                 const std::filesystem::path& sentences,
                                 const std::filesystem::path& out_dir, std::ostream& log);

/// Top-2 PCA of each example's selected representation: x, y, label.
std::size_t cmd_export_pca(const std::filesystem::path& checkpoint, const std::string& dataset,
                           const std::filesystem::path& data_path,
                           const std::filesystem::path& out_file, std::ostream& log);

struct ConvertRequest {
  std::string format;  ///< two-file, cr, trec
  std::filesystem::path positive;
  std::filesystem::path negative;
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path out;
};

std::size_t cmd_convert_dataset(const ConvertRequest& request, std::ostream& log);

DatasetStats cmd_stats(const std::string& dataset, const std::filesystem::path& path,
                       std::ostream& log);

/// Mean and sample standard deviation.
std::pair<Real, Real> mean_and_stddev(const std::vector<Real>& values);

}  // namespace adasent::tools
