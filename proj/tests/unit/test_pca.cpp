#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "adasent/pca.hpp"
#include "oracles.hpp"

using namespace adasent;

namespace {

double variance_along(const std::vector<Vector>& pts, const Vector& mean, const oracle::Vec& dir) {
  double s = 0.0;
  for (const auto& p : pts) {
    double proj = 0.0;
    for (std::size_t i = 0; i < dir.size(); ++i) proj += (p[i] - mean[i]) * dir[i];
    s += proj * proj;
  }
  return s / static_cast<double>(pts.size());
}

oracle::Vec unit(const oracle::Vec& v) { return oracle::scale(1.0 / oracle::naive_norm(v), v); }

}  // namespace

TEST(Pca, IdenticalPointsProjectToOrigin) {
  const std::vector<Vector> pts(5, Vector{1.0, -2.0, 3.0});
  const auto pca = principal_components(pts, 2);
  ASSERT_EQ(pca.components.size(), 2u);
  for (const auto& p : pts) {
    const Vector xy = project(p, pca);
    EXPECT_EQ(xy[0], 0.0);
    EXPECT_EQ(xy[1], 0.0);
  }
}

TEST(Pca, RankTwoReconstruction) {
  std::mt19937_64 rng(1);
  const Vector a = fixture::random_vector(6, rng);
  const Vector b = fixture::random_vector(6, rng);
  const Vector offset = fixture::random_vector(6, rng);
  std::vector<Vector> pts;
  std::normal_distribution<double> n(0, 1);
  for (int i = 0; i < 40; ++i) pts.push_back(offset + n(rng) * a + n(rng) * b);
  const auto pca = principal_components(pts, 2);
  for (const auto& p : pts) {
    const Vector xy = project(p, pca);
    Vector rec = pca.mean + xy[0] * pca.components[0] + xy[1] * pca.components[1];
    EXPECT_LE(oracle::max_abs_diff(rec.raw(), p.raw()), 1e-8);
  }
}

TEST(Pca, ComponentsAreOrthonormalWithSignConvention) {
  std::mt19937_64 rng(2);
  const auto pts = fixture::random_words(30, 5, rng);
  const auto pca = principal_components(pts, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(dot(pca.components[i], pca.components[i]), 1.0, 1e-12);
    for (std::size_t j = 0; j < i; ++j) EXPECT_NEAR(dot(pca.components[i], pca.components[j]), 0.0, 1e-8);
    for (double v : pca.components[i].values()) {
      if (std::abs(v) > 1e-12) {
        EXPECT_GT(v, 0.0);
        break;
      }
    }
  }
  EXPECT_GE(pca.variances[0], pca.variances[1]);
  EXPECT_GE(pca.variances[1], pca.variances[2]);
}

TEST(Pca, RandomProbesNeverBeatLeadingComponents) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0, 1);
  std::vector<Vector> pts;
  for (int i = 0; i < 60; ++i) {
    Vector p(5);
    for (std::size_t k = 0; k < 5; ++k) p[k] = n(rng) * (5.0 - static_cast<double>(k));
    pts.push_back(p);
  }
  const auto pca = principal_components(pts, 2);
  const double v1 = variance_along(pts, pca.mean, pca.components[0].raw());
  const double v2 = variance_along(pts, pca.mean, pca.components[1].raw());
  EXPECT_GE(v1, v2);
  for (int probe = 0; probe < 100; ++probe) {
    oracle::Vec d(5);
    for (double& x : d) x = n(rng);
    d = unit(d);
    EXPECT_GE(v1 + 1e-9, variance_along(pts, pca.mean, d));
    double along = 0.0;
    for (std::size_t i = 0; i < 5; ++i) along += d[i] * pca.components[0][i];
    for (std::size_t i = 0; i < 5; ++i) d[i] -= along * pca.components[0][i];
    d = unit(d);
    EXPECT_GE(v2 + 1e-9, variance_along(pts, pca.mean, d));
  }
}
