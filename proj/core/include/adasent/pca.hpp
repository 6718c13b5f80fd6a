#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "adasent/numerics.hpp"

namespace adasent {

struct PcaResult {
  Vector mean;
  std::vector<Vector> components;  ///< unit vectors, decreasing variance
  std::vector<Real> variances;     ///< eigenvalues of the sample covariance
};

/// Leading principal components of `points` by power iteration on the
/// covariance with deflation. Each component's first coordinate with
/// magnitude above 1e-12 is made positive.
PcaResult principal_components(std::span<const Vector> points, std::size_t count,
                               Real tolerance = 1e-9, std::size_t max_iterations = 200000,
                               std::uint64_t seed = 7);

/// Centered coordinates of `point` along each component.
Vector project(const Vector& point, const PcaResult& pca);

/// Sample covariance (divides by n).
Matrix covariance(std::span<const Vector> points, const Vector& mean);

}  // namespace adasent
