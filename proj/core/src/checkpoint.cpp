#include "adasent/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "adasent/error.hpp"

namespace adasent {

namespace {

constexpr const char* kMagic = "adasent-checkpoint";

std::string hexfloat(Real x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  std::string line() {
    std::string s;
    if (!std::getline(in_, s)) fail("unexpected end of file");
    ++line_no_;
    return s;
  }

  /// Reads `key value` and returns value.
  std::string field(const std::string& key) {
    const std::string s = line();
    const auto space = s.find(' ');
    if (s.substr(0, space) != key) fail("expected field '" + key + "'");
    return space == std::string::npos ? std::string() : s.substr(space + 1);
  }

  std::size_t count(const std::string& key) {
    const std::string v = field(key);
    char* end = nullptr;
    const auto n = std::strtoull(v.c_str(), &end, 10);
    if (v.empty() || *end != '\0') fail("field '" + key + "' is not a count");
    return static_cast<std::size_t>(n);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(source_, line_no_, what);
  }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_no_ = 0;
};

}  // namespace

ModelParams zero_params(const ModelConfig& config, std::size_t word_dim, std::size_t vocab_size) {
  std::mt19937_64 rng(0);
  ModelConfig c = config;
  return ModelParams::create(c, EmbeddingTable{Matrix(word_dim, vocab_size), true}, rng)
      .zeros_like();
}

void write_checkpoint(std::ostream& out, const Checkpoint& ck) {
  const auto& p = ck.params;
  const auto& c = p.config;
  out << kMagic << ' ' << kCheckpointVersion << '\n';
  out << "kind " << to_string(c.kind) << '\n';
  out << "pooling " << to_string(c.pooling) << '\n';
  out << "pyramid_dim " << c.pyramid_dim << '\n';
  out << "hidden_dim " << c.hidden_dim << '\n';
  out << "num_classes " << c.num_classes << '\n';
  out << "fine_tune " << (c.fine_tune_embeddings ? 1 : 0) << '\n';
  out << "project " << (c.project_words ? 1 : 0) << '\n';
  out << "max_tokens " << c.max_tokens << '\n';
  out << "word_dim " << p.word_dim() << '\n';
  out << "seed " << ck.seed << '\n';
  std::size_t echo_lines = 0;
  for (char ch : ck.config_echo) echo_lines += ch == '\n' ? 1 : 0;
  if (!ck.config_echo.empty() && ck.config_echo.back() != '\n') ++echo_lines;
  out << "config " << echo_lines << '\n' << ck.config_echo;
  if (!ck.config_echo.empty() && ck.config_echo.back() != '\n') out << '\n';
  out << "vocab " << ck.vocab.size() << '\n';
  for (const auto& w : ck.vocab.words()) out << w << '\n';
  const auto views = tensors(p, TensorSet::kAll);
  out << "tensors " << views.size() << '\n';
  for (const auto& t : views) {
    out << "tensor " << t.name << ' ' << t.rows << ' ' << t.cols << '\n';
    for (std::size_t r = 0; r < t.rows; ++r) {
      for (std::size_t col = 0; col < t.cols; ++col) {
        if (col) out << ' ';
        out << hexfloat(t.values[r * t.cols + col]);
      }
      out << '\n';
    }
  }
  out << "end\n";
}

Checkpoint read_checkpoint(std::istream& in, const std::string& source) {
  Reader r(in, source);
  const std::string header = r.line();
  if (header != std::string(kMagic) + " " + std::to_string(kCheckpointVersion)) {
    r.fail("not an adasent checkpoint (version " + std::to_string(kCheckpointVersion) + ")");
  }
  ModelConfig c;
  c.kind = parse_model_kind(r.field("kind"));
  c.pooling = parse_pooling(r.field("pooling"));
  c.pyramid_dim = r.count("pyramid_dim");
  c.hidden_dim = r.count("hidden_dim");
  c.num_classes = r.count("num_classes");
  c.fine_tune_embeddings = r.count("fine_tune") != 0;
  c.project_words = r.count("project") != 0;
  c.max_tokens = r.count("max_tokens");
  const std::size_t word_dim = r.count("word_dim");

  Checkpoint ck;
  ck.seed = r.count("seed");
  const std::size_t echo_lines = r.count("config");
  for (std::size_t i = 0; i < echo_lines; ++i) ck.config_echo += r.line() + '\n';
  const std::size_t vocab_size = r.count("vocab");
  if (vocab_size == 0) r.fail("empty vocabulary");
  for (std::size_t i = 0; i + 1 < vocab_size; ++i) {
    if (!ck.vocab.add(r.line())) r.fail("duplicate vocabulary entry");
  }
  if (r.line() != Vocabulary::kOovToken) r.fail("vocabulary must end with the OOV entry");
  ck.vocab.seal();

  ck.params = zero_params(c, word_dim, vocab_size);
  ck.params.embeddings.trainable = c.fine_tune_embeddings;
  auto views = tensors(ck.params, TensorSet::kAll);
  if (r.count("tensors") != views.size()) r.fail("tensor count does not match the model kind");
  for (auto& t : views) {
    std::istringstream head(r.line());
    std::string tag;
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    head >> tag >> name >> rows >> cols;
    if (tag != "tensor" || name != t.name || rows != t.rows || cols != t.cols) {
      r.fail("expected tensor " + t.name + " " + std::to_string(t.rows) + "x" +
             std::to_string(t.cols));
    }
    for (std::size_t row = 0; row < rows; ++row) {
      std::istringstream values(r.line());
      for (std::size_t col = 0; col < cols; ++col) {
        std::string tok;
        if (!(values >> tok)) r.fail("short row in tensor " + name);
        char* end = nullptr;
        const Real x = std::strtod(tok.c_str(), &end);
        if (*end != '\0') r.fail("bad number '" + tok + "' in tensor " + name);
        t.values[row * cols + col] = x;
      }
    }
  }
  if (r.line() != "end") r.fail("missing end marker");
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write checkpoint: " + path.string());
  write_checkpoint(out, checkpoint);
  if (!out) throw Error("failed writing checkpoint: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open checkpoint: " + path.string());
  return read_checkpoint(in, path.string());
}

}  // namespace adasent
