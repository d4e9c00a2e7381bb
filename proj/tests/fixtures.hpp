#pragma once

// Worked examples typed in by hand, plus small independent oracles used by
// the unit tests and the acceptance runner.

#include <cmath>
#include <complex>
#include <vector>

#include "arveson/arveson.hpp"

namespace fixtures {

using arveson::Colligation;
using arveson::Mat;
using arveson::MultiIndex;
using arveson::OutputPair;
using arveson::Point;
using arveson::Scalar;
using arveson::TruncatedSeries;

inline Mat unit_matrix(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
  Mat m = Mat::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

inline Point pt(Scalar a, Scalar b) {
  Point p(2);
  p << a, b;
  return p;
}

// S(l) = [l1^2, sqrt2 l1 l2, l2^2] realized on span{1, l1, l2}.
inline Colligation quadratic_inner() {
  const double h = 1.0 / std::sqrt(2.0);
  Mat b1 = Mat::Zero(3, 3), b2 = Mat::Zero(3, 3);
  b1(1, 0) = 1.0;
  b1(2, 1) = h;
  b2(1, 1) = h;
  b2(2, 2) = 1.0;
  Mat c = Mat::Zero(1, 3);
  c(0, 0) = 1.0;
  return Colligation({unit_matrix(3, 0, 1), unit_matrix(3, 0, 2)}, {b1, b2}, c, Mat::Zero(1, 3));
}

inline Mat quadratic_s(const Point& l) {
  Mat s(1, 3);
  s << l(0) * l(0), std::sqrt(2.0) * l(0) * l(1), l(1) * l(1);
  return s;
}

inline TruncatedSeries quadratic_series() {
  TruncatedSeries s(2, 2, 1, 3);
  Mat c = Mat::Zero(1, 3);
  c(0, 0) = 1.0;
  s.set(MultiIndex{2, 0}, c);
  c.setZero();
  c(0, 1) = std::sqrt(2.0);
  s.set(MultiIndex{1, 1}, c);
  c.setZero();
  c(0, 2) = 1.0;
  s.set(MultiIndex{0, 2}, c);
  return s;
}

// The second multiplier of the same space: [l1^2, l1 l2, l2^2, l1 l2].
inline TruncatedSeries split_series() {
  TruncatedSeries s(2, 2, 1, 4);
  Mat c = Mat::Zero(1, 4);
  c(0, 0) = 1.0;
  s.set(MultiIndex{2, 0}, c);
  c.setZero();
  c(0, 1) = 1.0;
  c(0, 3) = 1.0;
  s.set(MultiIndex{1, 1}, c);
  c.setZero();
  c(0, 2) = 1.0;
  s.set(MultiIndex{0, 2}, c);
  return s;
}

inline Mat split_s(const Point& l) {
  Mat s(1, 4);
  s << l(0) * l(0), l(0) * l(1), l(1) * l(1), l(0) * l(1);
  return s;
}

// Hand-derived B-family for the second multiplier with parameter alpha.
inline Colligation split_family(Scalar alpha) {
  Mat b1 = Mat::Zero(3, 4), b2 = Mat::Zero(3, 4);
  b1(1, 0) = 1.0;
  b1(2, 1) = (1.0 + alpha) / 2.0;
  b1(2, 3) = (1.0 - alpha) / 2.0;
  b2(1, 1) = (1.0 - alpha) / 2.0;
  b2(1, 3) = (1.0 + alpha) / 2.0;
  b2(2, 2) = 1.0;
  Mat c = Mat::Zero(1, 3);
  c(0, 0) = 1.0;
  return Colligation({unit_matrix(3, 0, 1), unit_matrix(3, 0, 2)}, {b1, b2}, c, Mat::Zero(1, 4));
}

// Noncommutative family with K_{C,A_g} = K_S for S = (1/2)[l1^2, l1l2, l1l2, l2^2, sqrt3].
inline OutputPair twisted_pair(double g) {
  Mat a1 = Mat::Zero(3, 3), a2 = Mat::Zero(3, 3);
  a1(0, 1) = 1.0;
  a1(2, 0) = g;
  a2(0, 2) = 1.0;
  a2(1, 0) = -g;
  Mat c = Mat::Zero(1, 3);
  c(0, 0) = 0.5;
  return OutputPair(c, {a1, a2});
}

inline Mat twisted_s(const Point& l) {
  Mat s(1, 5);
  s << l(0) * l(0), l(0) * l(1), l(0) * l(1), l(1) * l(1), std::sqrt(3.0);
  return s / 2.0;
}

// The 7x8 connecting operator for g = 0.
inline Colligation twisted_u0() {
  const OutputPair pr = twisted_pair(0.0);
  Mat b1 = Mat::Zero(3, 5), b2 = Mat::Zero(3, 5);
  b1(1, 0) = 1.0;
  b1(2, 1) = 1.0;
  b2(1, 2) = 1.0;
  b2(2, 3) = 1.0;
  Mat d = Mat::Zero(1, 5);
  d(0, 4) = std::sqrt(3.0) / 2.0;
  return Colligation(pr.A, {b1, b2}, pr.C, d);
}

// 2x4 rational multiplier whose H(K_S) is not backward-shift invariant.
inline Mat rational_s(const Point& l) {
  const Scalar l1 = l(0), l2 = l(1);
  const double r3 = std::sqrt(3.0);
  Mat s(2, 4);
  s << 2.0 * r3 * l1, r3 * l2 * l2, 2.0 - 2.0 * l1 * l2, -3.0 * l2,
      r3 * l1 * l1, 2.0 * r3 * l2, -3.0 * l1, 2.0 - 2.0 * l1 * l2;
  return s / (4.0 - l1 * l2);
}

// Factored form 3/((4 - l1l2)(4 - conj(z1 z2))) [2 l2; l1 2][2 conj z1; conj z2 2].
inline Mat rational_kernel_factored(const Point& l, const Point& z) {
  Mat left(2, 2), right(2, 2);
  left << 2.0, l(1), l(0), 2.0;
  right << 2.0, std::conj(z(0)), std::conj(z(1)), 2.0;
  const Scalar den = (4.0 - l(0) * l(1)) * (4.0 - std::conj(z(0) * z(1)));
  return 3.0 / den * left * right;
}

// f1 = 4/(4 - l1l2)[2; l1], f2 = 4/(4 - l1l2)[l2; 2], truncated at cap.
inline std::vector<TruncatedSeries> rational_span(int cap) {
  TruncatedSeries f1(2, cap, 2, 1), f2(2, cap, 2, 1);
  for (int k = 0; 2 * k <= cap; ++k) {
    const double c = std::pow(0.25, k);
    Mat v(2, 1);
    v << 2.0 * c, 0.0;
    f1.add(MultiIndex{k, k}, v);
    if (2 * k + 1 <= cap) {
      v << 0.0, c;
      f1.add(MultiIndex{k + 1, k}, v);
      v << c, 0.0;
      f2.add(MultiIndex{k, k + 1}, v);
    }
    v << 0.0, 2.0 * c;
    f2.add(MultiIndex{k, k}, v);
  }
  return {f1, f2};
}

// Scalar series long division (a_0 + a_1 t + ...)/(b_0 + b_1 t + ...).
inline std::vector<Scalar> series_divide(const std::vector<Scalar>& a, const std::vector<Scalar>& b, int n) {
  std::vector<Scalar> q(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 0; k <= n; ++k) {
    Scalar acc = k < static_cast<int>(a.size()) ? a[static_cast<std::size_t>(k)] : 0.0;
    for (int i = 1; i <= k && i < static_cast<int>(b.size()); ++i) {
      acc -= b[static_cast<std::size_t>(i)] * q[static_cast<std::size_t>(k - i)];
    }
    q[static_cast<std::size_t>(k)] = acc / b[0];
  }
  return q;
}

// Factorial-based multinomial |n|!/n!.
inline double multinomial(const MultiIndex& n) {
  double v = std::tgamma(n.total() + 1.0);
  for (int j = 0; j < n.dims(); ++j) v /= std::tgamma(n[j] + 1.0);
  return v;
}

// Contractive colligation with ||U|| = norm, shape (d p + r) x (p + q).
inline Colligation random_contractive(arveson::Rng& rng, int d, Eigen::Index p, Eigen::Index q, Eigen::Index r,
                                      double norm) {
  const Mat u = arveson::random_with_norm(rng, d * p + r, p + q, norm);
  return Colligation::from_matrix(d, p, u);
}

}  // namespace fixtures
