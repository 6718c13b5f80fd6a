#include "adasent/pca.hpp"

#include <cmath>
#include <random>

#include "adasent/error.hpp"

namespace adasent {

Matrix covariance(std::span<const Vector> points, const Vector& mean) {
  const std::size_t d = mean.dim();
  Matrix cov(d, d);
  for (const auto& p : points) {
    const Vector c = p - mean;
    add_outer(cov, c, c);
  }
  const Real inv = 1.0 / static_cast<Real>(points.size());
  for (auto& x : cov.values()) x *= inv;
  return cov;
}

namespace {

Real norm(const Vector& v) { return std::sqrt(dot(v, v)); }

void orthogonalize(Vector& v, const std::vector<Vector>& basis) {
  for (const auto& b : basis) axpy(-dot(v, b), b, v);
}

void fix_sign(Vector& v) {
  for (std::size_t i = 0; i < v.dim(); ++i) {
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0) v *= -1.0;
      return;
    }
  }
}

// Any unit vector orthogonal to `basis`, drawn from the standard basis.
Vector orthogonal_complement_vector(std::size_t dim, const std::vector<Vector>& basis) {
  for (std::size_t k = 0; k < dim; ++k) {
    Vector e(dim);
    e[k] = 1.0;
    orthogonalize(e, basis);
    orthogonalize(e, basis);
    const Real n = norm(e);
    if (n > 1e-6) return (1.0 / n) * e;
  }
  throw InvalidInputError("no direction left orthogonal to the existing components");
}

}  // namespace

PcaResult principal_components(std::span<const Vector> points, std::size_t count, Real tolerance,
                               std::size_t max_iterations, std::uint64_t seed) {
  if (points.empty()) throw InvalidInputError("PCA over zero points");
  const std::size_t d = points.front().dim();
  if (count == 0 || count > d) throw InvalidInputError("PCA component count must be in [1, dim]");
  PcaResult result;
  result.mean = Vector(d);
  for (const auto& p : points) {
    if (p.dim() != d) throw ShapeError("PCA points have differing dimensions");
    result.mean += p;
  }
  result.mean *= 1.0 / static_cast<Real>(points.size());
  Matrix cov = covariance(points, result.mean);
  const Real scale = [&] {
    Real trace = 0.0;
    for (std::size_t i = 0; i < d; ++i) trace += std::abs(cov(i, i));
    return trace;
  }();

  std::mt19937_64 rng(seed);
  std::normal_distribution<Real> gauss(0.0, 1.0);
  for (std::size_t k = 0; k < count; ++k) {
    Vector v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = gauss(rng);
    orthogonalize(v, result.components);
    v *= 1.0 / norm(v);
    Real eigenvalue = 0.0;
    bool degenerate = false;
    for (std::size_t it = 0; it < max_iterations; ++it) {
      Vector next = matvec(cov, v);
      orthogonalize(next, result.components);
      const Real n = norm(next);
      if (n <= 1e-14 * std::max(scale, Real{1e-300})) {
        degenerate = true;
        break;
      }
      next *= 1.0 / n;
      if (dot(next, v) < 0) next *= -1.0;
      const Real change = norm(next - v);
      v = std::move(next);
      if (change < tolerance) break;
    }
    if (degenerate || scale == 0.0) {
      v = orthogonal_complement_vector(d, result.components);
      eigenvalue = 0.0;
    } else {
      eigenvalue = dot(v, matvec(cov, v));
    }
    fix_sign(v);
    // Deflate so the next iteration finds the following component.
    add_outer(cov, v, v, -eigenvalue);
    result.components.push_back(std::move(v));
    result.variances.push_back(eigenvalue);
  }
  return result;
}

Vector project(const Vector& point, const PcaResult& pca) {
  const Vector c = point - pca.mean;
  Vector out(pca.components.size());
  for (std::size_t k = 0; k < pca.components.size(); ++k) out[k] = dot(c, pca.components[k]);
  return out;
}

}  // namespace adasent
