#pragma once

// Reference implementations written straight from the model formulas,
// independent of the library code paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "adasent/model.hpp"
#include "adasent/training.hpp"

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;  // row lists

inline Vec to_vec(const adasent::Vector& v) { return v.raw(); }

inline Mat to_mat(const adasent::Matrix& m) {
  Mat out(m.rows(), Vec(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
  return out;
}

inline Vec softmax(const Vec& x) {
  Vec e(x.size());
  double z = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) z += (e[i] = std::exp(x[i]));
  for (double& v : e) v /= z;
  return e;
}

inline Vec mul(const Mat& m, const Vec& v) {
  Vec out(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t k = 0; k < v.size(); ++k) out[i] += m[i][k] * v[k];
  return out;
}

inline Vec add(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline Vec scale(double s, Vec a) {
  for (double& v : a) v *= s;
  return a;
}

inline Vec tanh(Vec a) {
  for (double& v : a) v = std::tanh(v);
  return a;
}

/// One gated node, straight from the composition formulas.
inline Vec compose(const Vec& l, const Vec& r, const adasent::CompositionParams& p) {
  const Vec cand = tanh(add(add(mul(to_mat(p.w_left), l), mul(to_mat(p.w_right), r)), to_vec(p.b_w)));
  const Vec w = softmax(add(add(mul(to_mat(p.g_left), l), mul(to_mat(p.g_right), r)), to_vec(p.b_g)));
  return add(add(scale(w[0], l), scale(w[1], r)), scale(w[2], cand));
}

/// pyramid[t][j], t = 0 is the input sequence.
inline std::vector<std::vector<Vec>> pyramid(const std::vector<Vec>& words,
                                             const adasent::CompositionParams& p) {
  std::vector<std::vector<Vec>> levels{words};
  while (levels.back().size() > 1) {
    const auto& below = levels.back();
    std::vector<Vec> next;
    for (std::size_t j = 0; j + 1 < below.size(); ++j) next.push_back(compose(below[j], below[j + 1], p));
    levels.push_back(std::move(next));
  }
  return levels;
}

inline Vec mean(const std::vector<Vec>& units) {
  Vec out(units.front().size(), 0.0);
  for (const auto& u : units) out = add(out, u);
  return scale(1.0 / static_cast<double>(units.size()), out);
}

inline Vec max(const std::vector<Vec>& units) {
  Vec out = units.front();
  for (const auto& u : units)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], u[i]);
  return out;
}

inline Vec mlp(const Vec& x, const adasent::ClassifierParams& c) {
  const Vec h = tanh(add(mul(to_mat(c.w_hidden), x), to_vec(c.b_hidden)));
  return softmax(add(mul(to_mat(c.w_out), h), to_vec(c.b_out)));
}

inline Vec rnn(const std::vector<Vec>& xs, const adasent::RnnParams& p) {
  Vec h(p.recurrent.rows(), 0.0);
  for (const auto& x : xs) h = tanh(add(add(mul(to_mat(p.input), x), mul(to_mat(p.recurrent), h)), to_vec(p.bias)));
  return h;
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double naive_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace oracle

namespace fixture {

inline adasent::Vector random_vector(std::size_t dim, std::mt19937_64& rng, double lo = -1.0,
                                     double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  adasent::Vector v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = u(rng);
  return v;
}

inline std::vector<adasent::Vector> random_words(std::size_t count, std::size_t dim,
                                                 std::mt19937_64& rng) {
  std::vector<adasent::Vector> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_vector(dim, rng));
  return out;
}

inline std::vector<oracle::Vec> raw(const std::vector<adasent::Vector>& vs) {
  std::vector<oracle::Vec> out;
  for (const auto& v : vs) out.push_back(v.raw());
  return out;
}

/// Perturbs every entry (including biases) so no parameter sits at zero.
inline void jitter(adasent::CompositionParams& p, std::mt19937_64& rng, double amount = 0.5) {
  std::uniform_real_distribution<double> u(-amount, amount);
  for (auto* m : {&p.w_left, &p.w_right, &p.g_left, &p.g_right})
    for (double& v : m->values()) v += u(rng);
  for (auto* b : {&p.b_w, &p.b_g})
    for (double& v : b->values()) v += u(rng);
}

inline adasent::EmbeddingTable random_table(std::size_t dim, std::size_t vocab,
                                            std::mt19937_64& rng) {
  adasent::EmbeddingTable t;
  t.vectors = adasent::Matrix(dim, vocab);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : t.vectors.values()) v = u(rng);
  return t;
}

/// 50 examples over a 20-word vocabulary; label = whether any of the five
/// "positive" cue ids appears.
inline std::vector<adasent::LabeledSequence> separable_set(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> len(2, 6);
  std::uniform_int_distribution<adasent::TokenId> filler(10, 19);
  std::uniform_int_distribution<adasent::TokenId> pos(0, 4);
  std::uniform_int_distribution<adasent::TokenId> neg(5, 9);
  std::vector<adasent::LabeledSequence> out;
  for (std::size_t i = 0; i < count; ++i) {
    adasent::LabeledSequence s;
    s.label = i % 2;
    const std::size_t n = len(rng);
    for (std::size_t k = 0; k < n; ++k) s.ids.push_back(filler(rng));
    const std::size_t at = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    s.ids[at] = s.label == 1 ? pos(rng) : neg(rng);
    out.push_back(std::move(s));
  }
  return out;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("adasent-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  std::filesystem::path write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace fixture
