#include "adasent/run_config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "adasent/error.hpp"

namespace adasent {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw InputError("config key '" + std::string(key) + "': invalid value '" + std::string(value) + "'");
  }
  return out;
}

Real parse_real(std::string_view key, std::string_view value) {
  std::string buf(value);
  char* end = nullptr;
  const Real x = std::strtod(buf.c_str(), &end);
  if (buf.empty() || *end != '\0') {
    throw InputError("config key '" + std::string(key) + "': invalid number '" + buf + "'");
  }
  return x;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw InputError("config key '" + std::string(key) + "': expected a boolean, got '" +
                   std::string(value) + "'");
}

std::string format_real(Real x) {
  // Shortest text that round-trips.
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = {
      "model",   "dataset", "data",  "embeddings", "embedding_dim", "dim",       "hidden",
      "pooling", "lambda",  "lr",    "clip",       "batch",         "epochs",    "seed",
      "out",     "max_tokens", "fine_tune", "project", "valid_fraction", "restarts", "folds"};
  return k;
}

void RunConfig::set(std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  if (key == "model") model = parse_model_kind(value);
  else if (key == "dataset") dataset = value;
  else if (key == "data") data = value;
  else if (key == "embeddings") embeddings = value;
  else if (key == "embedding_dim") embedding_dim = parse_number<std::size_t>(key, value);
  else if (key == "dim") dim = parse_number<std::size_t>(key, value);
  else if (key == "hidden") hidden = parse_number<std::size_t>(key, value);
  else if (key == "pooling") pooling = parse_pooling(value);
  else if (key == "lambda") lambda = parse_real(key, value);
  else if (key == "lr") learning_rate = parse_real(key, value);
  else if (key == "clip") clip = parse_real(key, value);
  else if (key == "batch") batch = parse_number<std::size_t>(key, value);
  else if (key == "epochs") epochs = parse_number<std::size_t>(key, value);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "out") out = value;
  else if (key == "max_tokens") max_tokens = parse_number<std::size_t>(key, value);
  else if (key == "fine_tune") fine_tune = parse_bool(key, value);
  else if (key == "project") project = parse_bool(key, value);
  else if (key == "valid_fraction") valid_fraction = parse_real(key, value);
  else if (key == "restarts") restarts = parse_number<std::size_t>(key, value);
  else if (key == "folds") folds = parse_number<std::size_t>(key, value);
  else throw InputError("unknown config key '" + std::string(key) + "'");
}

std::string RunConfig::get(std::string_view key) const {
  if (key == "model") return std::string(to_string(model));
  if (key == "dataset") return dataset;
  if (key == "data") return data;
  if (key == "embeddings") return embeddings;
  if (key == "embedding_dim") return std::to_string(embedding_dim);
  if (key == "dim") return std::to_string(dim);
  if (key == "hidden") return std::to_string(hidden);
  if (key == "pooling") return std::string(to_string(pooling));
  if (key == "lambda") return format_real(lambda);
  if (key == "lr") return format_real(learning_rate);
  if (key == "clip") return format_real(clip);
  if (key == "batch") return std::to_string(batch);
  if (key == "epochs") return std::to_string(epochs);
  if (key == "seed") return std::to_string(seed);
  if (key == "out") return out;
  if (key == "max_tokens") return std::to_string(max_tokens);
  if (key == "fine_tune") return fine_tune ? "true" : "false";
  if (key == "project") return project ? "true" : "false";
  if (key == "valid_fraction") return format_real(valid_fraction);
  if (key == "restarts") return std::to_string(restarts);
  if (key == "folds") return std::to_string(folds);
  throw InputError("unknown config key '" + std::string(key) + "'");
}

void RunConfig::merge_text(std::string_view text, const std::string& source) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto stop = text.find('\n', start);
    if (stop == std::string_view::npos) stop = text.size();
    std::string_view line = text.substr(start, stop - start);
    start = stop + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected key=value");
    try {
      set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const InputError& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
}

void RunConfig::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  merge_text(buf.str(), path.string());
}

std::string RunConfig::echo() const {
  std::string out;
  for (const auto& k : keys()) out += k + "=" + get(k) + "\n";
  return out;
}

void RunConfig::validate() const {
  if (lambda < 0.0) throw InputError("lambda must be >= 0");
  if (!(clip > 0.0)) throw InputError("clip threshold must be > 0");
  if (!(learning_rate > 0.0)) throw InputError("learning rate must be > 0");
  if (dim == 0 || hidden == 0 || embedding_dim == 0) throw InputError("dimensions must be >= 1");
  if ((model != ModelKind::kCbow || project) && dim < embedding_dim) {
    throw InputError("pyramid dimension D=" + std::to_string(dim) +
                     " must be >= word dimension d=" + std::to_string(embedding_dim));
  }
  if (batch == 0) throw InputError("batch size must be >= 1");
  if (valid_fraction < 0.0 || valid_fraction >= 1.0) throw InputError("valid_fraction must be in [0, 1)");
  if (restarts == 0) throw InputError("restarts must be >= 1");
  if (folds == 0 || folds > 10) throw InputError("folds must be in [1, 10]");
  if (max_tokens == 0) throw InputError("max_tokens must be >= 1");
}

TrainConfig RunConfig::train_config(std::size_t num_classes) const {
  TrainConfig t;
  t.model.kind = model;
  t.model.pyramid_dim = dim;
  t.model.hidden_dim = hidden;
  t.model.num_classes = num_classes;
  t.model.pooling = pooling;
  t.model.fine_tune_embeddings = fine_tune;
  t.model.project_words = project;
  t.model.max_tokens = max_tokens;
  t.lambda = lambda;
  t.learning_rate = learning_rate;
  t.clip = clip;
  t.batch_size = batch;
  t.epochs = epochs;
  t.seed = seed;
  return t;
}

std::filesystem::path resolve_data_path(const std::string& path) {
  std::filesystem::path p(path);
  if (p.empty() || p.is_absolute() || std::filesystem::exists(p)) return p;
  if (const char* dir = std::getenv(kDataDirEnv); dir != nullptr && *dir != '\0') {
    auto candidate = std::filesystem::path(dir) / p;
    if (std::filesystem::exists(candidate)) return candidate;
  }
  return p;
}

}  // namespace adasent
