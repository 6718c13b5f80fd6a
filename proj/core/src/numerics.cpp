#include "adasent/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adasent/error.hpp"

namespace adasent {

namespace {

void require_same_dim(const Vector& a, const Vector& b, const char* op) {
  if (a.dim() != b.dim()) {
    throw ShapeError(std::string(op) + ": dimension mismatch " + std::to_string(a.dim()) +
                     " vs " + std::to_string(b.dim()));
  }
}

}  // namespace

void Vector::fill(Real v) { std::fill(data_.begin(), data_.end(), v); }

Vector& Vector::operator+=(const Vector& other) {
  require_same_dim(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Vector& Vector::operator-=(const Vector& other) {
  require_same_dim(*this, other, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Vector& Vector::operator*=(Real s) {
  for (auto& x : data_) x *= s;
  return *this;
}

Vector operator+(Vector a, const Vector& b) { return a += b; }
Vector operator-(Vector a, const Vector& b) { return a -= b; }
Vector operator*(Real s, Vector v) { return v *= s; }

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<Real> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("Matrix: data length " + std::to_string(data_.size()) + " != " +
                     std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector Matrix::column(std::size_t c) const {
  if (c >= cols_) throw IndexError("Matrix::column: index out of range");
  Vector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void Matrix::fill(Real v) { std::fill(data_.begin(), data_.end(), v); }

Vector softmax(const Vector& logits) {
  if (logits.empty()) throw InvalidInputError("softmax: empty input");
  if (!all_finite(logits.values())) throw InvalidInputError("softmax: non-finite input");
  const Real peak = *std::max_element(logits.values().begin(), logits.values().end());
  Vector out(logits.dim());
  Real total = 0.0;
  for (std::size_t i = 0; i < logits.dim(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  for (std::size_t i = 0; i < out.dim(); ++i) out[i] /= total;
  return out;
}

TanhResult tanh_map(const Vector& v) {
  if (!all_finite(v.values())) throw InvalidInputError("tanh_map: non-finite input");
  TanhResult r{Vector(v.dim()), Vector(v.dim())};
  for (std::size_t i = 0; i < v.dim(); ++i) {
    const Real a = std::tanh(v[i]);
    r.activated[i] = a;
    r.derivative[i] = 1.0 - a * a;
  }
  return r;
}

Vector matvec(const Matrix& m, const Vector& v) {
  if (m.cols() != v.dim()) {
    throw ShapeError("matvec: matrix is " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + ", vector has dim " + std::to_string(v.dim()));
  }
  Vector out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    Real acc = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) acc += row[c] * v[c];
    out[r] = acc;
  }
  return out;
}

Vector affine(const Matrix& m, const Vector& v, const Vector& bias) {
  if (bias.dim() != m.rows()) {
    throw ShapeError("affine: bias dim " + std::to_string(bias.dim()) + " != rows " +
                     std::to_string(m.rows()));
  }
  Vector out = matvec(m, v);
  for (std::size_t i = 0; i < out.dim(); ++i) out[i] += bias[i];
  return out;
}

Vector matvec_transposed(const Matrix& m, const Vector& v) {
  Vector out(m.cols());
  add_matvec_transposed(m, v, out);
  return out;
}

void add_matvec_transposed(const Matrix& m, const Vector& v, Vector& out) {
  if (m.rows() != v.dim() || out.dim() != m.cols()) {
    throw ShapeError("matvec_transposed: dimension mismatch");
  }
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const Real s = v[r];
    if (s == 0.0) continue;
    const auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) out[c] += row[c] * s;
  }
}

void add_outer(Matrix& m, const Vector& a, const Vector& b, Real scale) {
  if (m.rows() != a.dim() || m.cols() != b.dim()) {
    throw ShapeError("add_outer: dimension mismatch");
  }
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const Real s = scale * a[r];
    if (s == 0.0) continue;
    auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += s * b[c];
  }
}

void axpy(Real a, const Vector& x, Vector& y) {
  require_same_dim(x, y, "axpy");
  for (std::size_t i = 0; i < x.dim(); ++i) y[i] += a * x[i];
}

Real dot(const Vector& a, const Vector& b) {
  require_same_dim(a, b, "dot");
  Real acc = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) acc += a[i] * b[i];
  return acc;
}

Vector hadamard(const Vector& a, const Vector& b) {
  require_same_dim(a, b, "hadamard");
  Vector out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] * b[i];
  return out;
}

Real squared_norm(std::span<const Real> values) {
  Real acc = 0.0;
  for (Real x : values) acc += x * x;
  return acc;
}

Real frobenius_squared(const Matrix& m) { return squared_norm(m.values()); }

bool all_finite(std::span<const Real> values) {
  return std::all_of(values.begin(), values.end(), [](Real x) { return std::isfinite(x); });
}

}  // namespace adasent
