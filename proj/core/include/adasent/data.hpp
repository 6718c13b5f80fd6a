#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <istream>
#include <ostream>
#include <unordered_set>
#include <vector>

#include "adasent/embedding.hpp"
#include "adasent/training.hpp"

namespace adasent {

enum class SplitProtocol { kCrossValidation10, kFixedTest };

enum class Partition { kUnassigned, kTrain, kTest };

struct Example {
  std::string text;
  std::size_t label = 0;
  std::vector<std::string> tokens;
  Partition partition = Partition::kUnassigned;
};

/// Published shape of a benchmark, used to sanity check loaded data.
struct DatasetSpec {
  std::string name;
  std::size_t num_classes = 2;
  SplitProtocol protocol = SplitProtocol::kCrossValidation10;
  std::vector<std::string> label_names;
  std::size_t expected_size = 0;  ///< 0 when unknown
  std::vector<double> expected_distribution;
  double expected_mean_length = 0.0;
  std::size_t expected_test_size = 0;
};

/// mr, cr, subj, mpqa, trec; anything else is rejected. `custom` accepts a
/// normalized file with any K >= 2 (inferred from the labels).
DatasetSpec dataset_spec(std::string_view name);
std::vector<std::string> known_datasets();

struct LoadedDataset {
  DatasetSpec spec;
  std::vector<Example> examples;
  std::size_t dropped_empty = 0;
  std::vector<std::string> warnings;
};

/// Reads normalized `label<TAB>text` lines. Fixed-test datasets take a
/// directory holding `train.tsv` and `test.tsv`; the others take one file.
LoadedDataset load_dataset(std::string_view name, const std::filesystem::path& path);

/// Parses normalized lines from memory (`source` names the input in errors).
std::vector<Example> parse_normalized(std::istream& in, const std::string& source,
                                      std::size_t num_classes, std::size_t* dropped_empty,
                                      std::vector<std::string>* warnings);

void write_normalized(std::ostream& out, std::span<const Example> examples);

struct FoldSplit {
  SplitProtocol protocol = SplitProtocol::kCrossValidation10;
  /// cv10: fold id (0..9) per example. fixed-test: 0 = train, 1 = test.
  std::vector<std::size_t> assignment;
  std::size_t num_folds = 10;

  std::vector<std::size_t> members(std::size_t fold) const;
  std::vector<std::size_t> complement(std::size_t fold) const;
};

inline constexpr std::size_t kCrossValidationFolds = 10;

/// Stratified 10 folds for cv10 (per-class fold sizes differ by at most
/// one); the given partition for fixed-test.
FoldSplit make_folds(std::span<const Example> examples, SplitProtocol protocol,
                     std::uint64_t seed, std::size_t num_classes);

/// Deterministically moves `fraction` of `train` (stratified) into a
/// validation list.
void split_validation(std::vector<std::size_t>& train, std::vector<std::size_t>& valid,
                      std::span<const Example> examples, double fraction, std::uint64_t seed,
                      std::size_t num_classes);

struct DatasetStats {
  std::size_t size = 0;
  std::vector<double> distribution;
  std::vector<std::size_t> counts;
  double mean_length = 0.0;
};

DatasetStats dataset_stats(std::span<const Example> examples, std::size_t num_classes);

/// Every distinct token in the examples.
std::unordered_set<std::string> vocabulary_of(std::span<const Example> examples);

/// Map tokens to ids (capped at `max_tokens`).
std::vector<LabeledSequence> encode(std::span<const Example> examples, const Vocabulary& vocab,
                                    std::size_t max_tokens);
std::vector<LabeledSequence> encode(std::span<const Example> examples,
                                    std::span<const std::size_t> indices, const Vocabulary& vocab,
                                    std::size_t max_tokens);

// Adapters from public distributions into normalized examples.

/// One sentence per line in each file; `positive` lines get label 1.
std::vector<Example> convert_two_file(const std::filesystem::path& positive,
                                      const std::filesystem::path& negative);

/// Customer-review files annotated as `feat[+2],feat[-1]##sentence`. The
/// sign of the summed annotation decides the label; unannotated, `[t]`
/// title and `*` comment lines are skipped. Files are flattened in order.
std::vector<Example> convert_customer_reviews(std::span<const std::filesystem::path> files);

/// `COARSE:fine question text` lines, coarse labels ABBR DESC ENTY HUM LOC NUM.
std::vector<Example> convert_trec(const std::filesystem::path& path);

/// Returns the line as UTF-8, transcoding from Latin-1 when it is not
/// already valid UTF-8.
std::string to_utf8(std::string_view line);

}  // namespace adasent
