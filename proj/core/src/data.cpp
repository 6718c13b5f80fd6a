#include "adasent/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "adasent/error.hpp"

namespace adasent {

DatasetSpec dataset_spec(std::string_view name) {
  using enum SplitProtocol;
  if (name == "mr") return {"mr", 2, kCrossValidation10, {"negative", "positive"}, 10662, {0.5, 0.5}, 18, 0};
  if (name == "cr") return {"cr", 2, kCrossValidation10, {"negative", "positive"}, 3788, {0.36, 0.64}, 17, 0};
  if (name == "subj") return {"subj", 2, kCrossValidation10, {"objective", "subjective"}, 10000, {0.5, 0.5}, 21, 0};
  if (name == "mpqa") return {"mpqa", 2, kCrossValidation10, {"negative", "positive"}, 10099, {0.69, 0.31}, 3, 0};
  if (name == "trec") {
    return {"trec", 6, kFixedTest, {"ABBR", "DESC", "ENTY", "HUM", "LOC", "NUM"}, 5952,
            {0.1, 0.2, 0.2, 0.1, 0.2, 0.2}, 10, 500};
  }
  if (name == "custom") return {"custom", 0, kCrossValidation10, {}, 0, {}, 0, 0};
  throw InvalidInputError("unknown dataset '" + std::string(name) +
                          "' (expected mr, cr, subj, mpqa, trec or custom)");
}

std::vector<std::string> known_datasets() { return {"mr", "cr", "subj", "mpqa", "trec", "custom"}; }

std::vector<Example> parse_normalized(std::istream& in, const std::string& source,
                                      std::size_t num_classes, std::size_t* dropped_empty,
                                      std::vector<std::string>* warnings) {
  std::vector<Example> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(source, line_no, "missing TAB separator");
    std::size_t label = 0;
    const char* first = line.data();
    const char* last = line.data() + tab;
    auto [ptr, ec] = std::from_chars(first, last, label);
    if (ec != std::errc() || ptr != last) {
      throw ParseError(source, line_no, "label '" + line.substr(0, tab) + "' is not an integer");
    }
    if (num_classes != 0 && label >= num_classes) {
      throw ParseError(source, line_no,
                       "label " + std::to_string(label) + " >= K=" + std::to_string(num_classes));
    }
    Example ex;
    ex.label = label;
    ex.text = to_utf8(std::string_view(line).substr(tab + 1));
    ex.tokens = tokenize(ex.text);
    if (ex.tokens.empty()) {
      if (dropped_empty) ++*dropped_empty;
      if (warnings) warnings->push_back(source + ":" + std::to_string(line_no) + ": empty example dropped");
      continue;
    }
    out.push_back(std::move(ex));
  }
  return out;
}

namespace {

std::vector<Example> read_normalized_file(const std::filesystem::path& path,
                                          std::size_t num_classes, LoadedDataset& result) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset file: " + path.string());
  return parse_normalized(in, path.string(), num_classes, &result.dropped_empty, &result.warnings);
}

}  // namespace

LoadedDataset load_dataset(std::string_view name, const std::filesystem::path& path) {
  LoadedDataset result;
  result.spec = dataset_spec(name);
  if (result.spec.protocol == SplitProtocol::kFixedTest) {
    if (!std::filesystem::is_directory(path)) {
      throw InputError(std::string(name) + " uses a fixed test split; expected a directory with "
                       "train.tsv and test.tsv: " + path.string());
    }
    auto train = read_normalized_file(path / "train.tsv", result.spec.num_classes, result);
    auto test = read_normalized_file(path / "test.tsv", result.spec.num_classes, result);
    for (auto& ex : train) ex.partition = Partition::kTrain;
    for (auto& ex : test) ex.partition = Partition::kTest;
    result.examples = std::move(train);
    result.examples.insert(result.examples.end(), std::make_move_iterator(test.begin()),
                           std::make_move_iterator(test.end()));
    if (result.spec.expected_test_size != 0 && test.size() != result.spec.expected_test_size) {
      result.warnings.push_back("test split has " + std::to_string(test.size()) +
                                " examples, published size is " +
                                std::to_string(result.spec.expected_test_size));
    }
  } else {
    result.examples = read_normalized_file(path, result.spec.num_classes, result);
  }
  if (result.examples.empty()) throw InputError("dataset has no usable examples: " + path.string());
  if (result.spec.num_classes == 0) {
    std::size_t max_label = 0;
    for (const auto& ex : result.examples) max_label = std::max(max_label, ex.label);
    result.spec.num_classes = std::max<std::size_t>(2, max_label + 1);
  }
  if (result.spec.expected_size != 0 && result.examples.size() != result.spec.expected_size) {
    result.warnings.push_back("loaded " + std::to_string(result.examples.size()) +
                              " examples, published size is " +
                              std::to_string(result.spec.expected_size));
  }
  return result;
}

void write_normalized(std::ostream& out, std::span<const Example> examples) {
  for (const auto& ex : examples) {
    std::string text = ex.text;
    std::replace(text.begin(), text.end(), '\t', ' ');
    std::replace(text.begin(), text.end(), '\n', ' ');
    out << ex.label << '\t' << text << '\n';
  }
}

std::vector<std::size_t> FoldSplit::members(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldSplit::complement(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != fold) out.push_back(i);
  }
  return out;
}

namespace {

std::vector<std::vector<std::size_t>> by_class(std::span<const Example> examples,
                                               std::span<const std::size_t> indices,
                                               std::size_t num_classes) {
  std::vector<std::vector<std::size_t>> classes(num_classes);
  for (std::size_t i : indices) {
    if (examples[i].label >= num_classes) throw InvalidLabelError("label exceeds class count");
    classes[examples[i].label].push_back(i);
  }
  return classes;
}

}  // namespace

FoldSplit make_folds(std::span<const Example> examples, SplitProtocol protocol,
                     std::uint64_t seed, std::size_t num_classes) {
  FoldSplit split;
  split.protocol = protocol;
  split.assignment.assign(examples.size(), 0);
  if (protocol == SplitProtocol::kFixedTest) {
    split.num_folds = 2;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      switch (examples[i].partition) {
        case Partition::kTrain: split.assignment[i] = 0; break;
        case Partition::kTest: split.assignment[i] = 1; break;
        case Partition::kUnassigned:
          throw InvalidInputError("fixed-test protocol requires every example to carry a train/test partition");
      }
    }
    return split;
  }
  if (examples.size() < kCrossValidationFolds) {
    throw InvalidInputError("10-fold cross-validation needs at least 10 examples");
  }
  split.num_folds = kCrossValidationFolds;
  std::vector<std::size_t> all(examples.size());
  std::iota(all.begin(), all.end(), 0);
  auto classes = by_class(examples, all, num_classes);
  std::mt19937_64 rng(seed);
  std::size_t cursor = 0;
  for (auto& members : classes) {
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i : members) split.assignment[i] = cursor++ % kCrossValidationFolds;
  }
  return split;
}

void split_validation(std::vector<std::size_t>& train, std::vector<std::size_t>& valid,
                      std::span<const Example> examples, double fraction, std::uint64_t seed,
                      std::size_t num_classes) {
  valid.clear();
  if (fraction <= 0.0) return;
  auto classes = by_class(examples, train, num_classes);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> kept;
  for (auto& members : classes) {
    std::shuffle(members.begin(), members.end(), rng);
    const auto n_valid = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(members.size())));
    for (std::size_t k = 0; k < members.size(); ++k) {
      (k < n_valid ? valid : kept).push_back(members[k]);
    }
  }
  std::sort(kept.begin(), kept.end());
  std::sort(valid.begin(), valid.end());
  train = std::move(kept);
}

DatasetStats dataset_stats(std::span<const Example> examples, std::size_t num_classes) {
  if (examples.empty()) throw InvalidInputError("statistics of an empty dataset");
  DatasetStats s;
  s.size = examples.size();
  s.counts.assign(num_classes, 0);
  std::size_t tokens = 0;
  for (const auto& ex : examples) {
    if (ex.label >= num_classes) throw InvalidLabelError("label exceeds class count");
    ++s.counts[ex.label];
    tokens += ex.tokens.size();
  }
  for (std::size_t c : s.counts) s.distribution.push_back(static_cast<double>(c) / s.size);
  s.mean_length = static_cast<double>(tokens) / static_cast<double>(s.size);
  return s;
}

std::unordered_set<std::string> vocabulary_of(std::span<const Example> examples) {
  std::unordered_set<std::string> words;
  for (const auto& ex : examples) words.insert(ex.tokens.begin(), ex.tokens.end());
  return words;
}

std::vector<LabeledSequence> encode(std::span<const Example> examples, const Vocabulary& vocab,
                                    std::size_t max_tokens) {
  std::vector<std::size_t> all(examples.size());
  std::iota(all.begin(), all.end(), 0);
  return encode(examples, all, vocab, max_tokens);
}

std::vector<LabeledSequence> encode(std::span<const Example> examples,
                                    std::span<const std::size_t> indices, const Vocabulary& vocab,
                                    std::size_t max_tokens) {
  std::vector<LabeledSequence> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    const auto& ex = examples[i];
    if (ex.tokens.empty()) throw EmptySentenceError();
    out.push_back({lookup_tokens(ex.tokens, vocab, max_tokens), ex.label});
  }
  return out;
}

std::string to_utf8(std::string_view line) {
  // Validate UTF-8 first; fall back to Latin-1 (the MR/SUBJ/TREC releases).
  std::size_t i = 0;
  bool valid = true;
  while (i < line.size()) {
    const auto c = static_cast<unsigned char>(line[i]);
    std::size_t extra = 0;
    if (c < 0x80) extra = 0;
    else if ((c & 0xE0) == 0xC0 && c >= 0xC2) extra = 1;
    else if ((c & 0xF0) == 0xE0) extra = 2;
    else if ((c & 0xF8) == 0xF0 && c <= 0xF4) extra = 3;
    else { valid = false; break; }
    if (i + extra >= line.size() && extra > 0) {
      valid = false;
      break;
    }
    for (std::size_t k = 1; k <= extra; ++k) {
      if ((static_cast<unsigned char>(line[i + k]) & 0xC0) != 0x80) { valid = false; break; }
    }
    if (!valid) break;
    i += extra + 1;
  }
  if (valid) return std::string(line);
  std::string out;
  out.reserve(line.size() * 2);
  for (char ch : line) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80) {
      out.push_back(ch);
    } else {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(to_utf8(line));
  }
  return lines;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::vector<Example> convert_two_file(const std::filesystem::path& positive,
                                      const std::filesystem::path& negative) {
  std::vector<Example> out;
  for (auto [path, label] : {std::pair{positive, std::size_t{1}}, std::pair{negative, std::size_t{0}}}) {
    for (auto& line : read_lines(path)) {
      std::string text = trim(line);
      if (text.empty()) continue;
      Example ex;
      ex.label = label;
      ex.tokens = tokenize(text);
      ex.text = std::move(text);
      out.push_back(std::move(ex));
    }
  }
  return out;
}

std::vector<Example> convert_customer_reviews(std::span<const std::filesystem::path> files) {
  std::vector<Example> out;
  for (const auto& path : files) {
    const auto lines = read_lines(path);
    for (std::size_t n = 0; n < lines.size(); ++n) {
      const std::string& line = lines[n];
      if (line.empty() || line.starts_with("*") || line.starts_with("[t]")) continue;
      const auto sep = line.find("##");
      if (sep == std::string::npos) continue;
      const std::string_view tags = std::string_view(line).substr(0, sep);
      long score = 0;
      bool annotated = false;
      std::size_t pos = 0;
      while ((pos = tags.find('[', pos)) != std::string_view::npos) {
        const auto close = tags.find(']', pos);
        if (close == std::string_view::npos) break;
        const std::string_view inner = tags.substr(pos + 1, close - pos - 1);
        if (!inner.empty() && (inner[0] == '+' || inner[0] == '-')) {
          long value = 0;
          const char* first = inner.data() + 1;
          const char* last = inner.data() + inner.size();
          auto [ptr, ec] = std::from_chars(first, last, value);
          if (ec != std::errc() || ptr != last) {
            throw ParseError(path.string(), n + 1, "malformed annotation '[" + std::string(inner) + "]'");
          }
          score += inner[0] == '+' ? value : -value;
          annotated = true;
        }
        pos = close + 1;
      }
      if (!annotated || score == 0) continue;
      std::string text = trim(std::string_view(line).substr(sep + 2));
      if (text.empty()) continue;
      Example ex;
      ex.label = score > 0 ? 1 : 0;
      ex.tokens = tokenize(text);
      ex.text = std::move(text);
      out.push_back(std::move(ex));
    }
  }
  return out;
}

std::vector<Example> convert_trec(const std::filesystem::path& path) {
  static const std::map<std::string, std::size_t, std::less<>> kCoarse = {
      {"ABBR", 0}, {"DESC", 1}, {"ENTY", 2}, {"HUM", 3}, {"LOC", 4}, {"NUM", 5}};
  std::vector<Example> out;
  const auto lines = read_lines(path);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string& line = lines[n];
    if (trim(line).empty()) continue;
    const auto colon = line.find(':');
    const auto space = line.find(' ');
    if (colon == std::string::npos || space == std::string::npos || colon > space) {
      throw ParseError(path.string(), n + 1, "expected 'COARSE:fine text'");
    }
    const auto it = kCoarse.find(std::string_view(line).substr(0, colon));
    if (it == kCoarse.end()) {
      throw ParseError(path.string(), n + 1, "unknown coarse label '" + line.substr(0, colon) + "'");
    }
    Example ex;
    ex.label = it->second;
    ex.text = trim(std::string_view(line).substr(space + 1));
    ex.tokens = tokenize(ex.text);
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace adasent
