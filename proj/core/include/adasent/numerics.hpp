#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace adasent {

using Real = double;

/// Dense column vector.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim, Real fill = 0.0) : data_(dim, fill) {}
  Vector(std::initializer_list<Real> values) : data_(values) {}
  explicit Vector(std::vector<Real> values) : data_(std::move(values)) {}

  std::size_t dim() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  Real& operator[](std::size_t i) noexcept { return data_[i]; }
  Real operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<Real> values() noexcept { return data_; }
  std::span<const Real> values() const noexcept { return data_; }
  const std::vector<Real>& raw() const noexcept { return data_; }

  void fill(Real v);

  Vector& operator+=(const Vector& other);
  Vector& operator-=(const Vector& other);
  Vector& operator*=(Real s);

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<Real> data_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator*(Real s, Vector v);

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, Real fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<Real> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  Real& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  Real operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<Real> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const Real> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  Vector column(std::size_t c) const;

  std::span<Real> values() noexcept { return data_; }
  std::span<const Real> values() const noexcept { return data_; }

  void fill(Real v);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Real> data_;
};

/// Numerically stable softmax (max-subtracted). Throws InvalidInputError on
/// empty or non-finite input.
Vector softmax(const Vector& logits);

struct TanhResult {
  Vector activated;
  Vector derivative;  ///< 1 - tanh^2, kept for the backward pass
};

TanhResult tanh_map(const Vector& v);

Vector matvec(const Matrix& m, const Vector& v);
Vector affine(const Matrix& m, const Vector& v, const Vector& bias);

/// m^T v
Vector matvec_transposed(const Matrix& m, const Vector& v);

/// out += m^T v, with out already sized m.cols().
void add_matvec_transposed(const Matrix& m, const Vector& v, Vector& out);

/// m += scale * a b^T
void add_outer(Matrix& m, const Vector& a, const Vector& b, Real scale = 1.0);

/// y += a * x
void axpy(Real a, const Vector& x, Vector& y);

Real dot(const Vector& a, const Vector& b);
Vector hadamard(const Vector& a, const Vector& b);

Real squared_norm(std::span<const Real> values);
Real frobenius_squared(const Matrix& m);

bool all_finite(std::span<const Real> values);

}  // namespace adasent
