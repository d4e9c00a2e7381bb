#pragma once

// Seeded random generators for points in the ball and test matrices.

#include <cstdint>
#include <random>
#include <vector>

#include "arveson/linalg.hpp"

namespace arveson {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 20240611;

inline Scalar complex_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

inline Mat random_gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = complex_normal(rng);
  }
  return m;
}

/// Uniform point in the closed ball of the given radius in C^d.
inline Point random_ball_point(Rng& rng, int d, double radius) {
  Point v(d);
  for (int j = 0; j < d; ++j) v(j) = complex_normal(rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = radius * std::pow(u(rng), 1.0 / (2.0 * d));
  return v * (r / v.norm());
}

inline std::vector<Point> random_ball_points(Rng& rng, int n, int d, double radius) {
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pts.push_back(random_ball_point(rng, d, radius));
  return pts;
}

/// Haar-distributed unitary (QR of a Gaussian matrix with phase fix).
inline Mat random_unitary(Rng& rng, Eigen::Index n) {
  Mat g = random_gaussian(rng, n, n);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar rii = r(i, i);
    if (std::abs(rii) > 0) q.col(i) *= rii / std::abs(rii);
  }
  return q;
}

/// Random matrix scaled to the given spectral norm.
inline Mat random_with_norm(Rng& rng, Eigen::Index rows, Eigen::Index cols, double target) {
  Mat m = random_gaussian(rng, rows, cols);
  const double n = norm2(m);
  return n > 0 ? Mat(m * (target / n)) : m;
}

}  // namespace arveson
