#pragma once

// Observability of output pairs: the operator x -> C(I - Z(l)A)^{-1}x, its
// adjoint, the gramian of the Stein equation G = C*C + sum A_j* G A_j, and
// strong stability through the completely positive map Phi(X) = sum A_j* X A_j.

#include <vector>

#include "arveson/colligation.hpp"

namespace arveson {

inline Mat cp_map(const std::vector<Mat>& a, const Mat& x) {
  Mat out = Mat::Zero(x.rows(), x.cols());
  for (const Mat& aj : a) out += aj.adjoint() * x * aj;
  return out;
}

/// Phi^N(I).
inline Mat cp_power(const std::vector<Mat>& a, int n) {
  const Eigen::Index p = a.front().rows();
  Mat x = Mat::Identity(p, p);
  for (int k = 0; k < n; ++k) x = cp_map(a, x);
  return x;
}

inline TruncatedSeries observability_apply(const OutputPair& pair, const Vec& x, int cap) {
  if (x.size() != pair.p()) throw ShapeError("observability_apply: state vector length mismatch");
  return word_series(pair, cap).right(x);
}

/// O* f = sum_n (n!/|n|!) W_n^* f_n, which is sum_n A^{*n} C^* f_n when the
/// tuple commutes. f lies in the annihilated subspace iff this vanishes.
inline Vec annihilator_residual(const OutputPair& pair, const TruncatedSeries& f) {
  if (f.cols() != 1 || f.rows() != pair.r() || f.dims() != pair.d) {
    throw ShapeError("annihilator_residual: expected a " + std::to_string(pair.r()) +
                     "-vector valued polynomial in " + std::to_string(pair.d) + " variables");
  }
  const int deg = std::max(f.degree(), 0);
  const TruncatedSeries w = word_series(pair, deg);
  Vec out = Vec::Zero(pair.p());
  for (const auto& [n, fn] : f.terms()) {
    out += w.coeff(n).adjoint() * fn.col(0) / static_cast<double>(weight(n));
  }
  return out;
}

struct StabilityReport {
  bool stable = false;
  bool inconclusive = false;
  int horizon = 0;             // N at which the trace fell below tol
  std::vector<double> decay;   // trace Phi^N(I), N = 0, 1, ...
};

inline StabilityReport strong_stability(const std::vector<Mat>& a, double tol = kDefaultTol,
                                        int max_iter = 2000) {
  if (a.empty()) throw ShapeError("strong_stability: empty tuple");
  StabilityReport rep;
  const Eigen::Index p = a.front().rows();
  Mat x = Mat::Identity(p, p);
  rep.decay.push_back(x.trace().real());
  if (rep.decay.back() <= tol) {
    rep.stable = true;
    return rep;
  }
  for (int n = 1; n <= max_iter; ++n) {
    x = cp_map(a, x);
    rep.decay.push_back(x.trace().real());
    if (rep.decay.back() <= tol) {
      rep.stable = true;
      rep.horizon = n;
      return rep;
    }
  }
  rep.horizon = max_iter;
  const std::size_t k = rep.decay.size();
  rep.inconclusive = k >= 2 && rep.decay[k - 1] < rep.decay[k - 2] * (1.0 - 1e-12);
  return rep;
}

namespace detail {

// Matrix of X -> sum A_j* X A_j acting on column-major vec(X).
inline Mat cp_superoperator(const std::vector<Mat>& a) {
  const Eigen::Index p = a.front().rows();
  Mat m = Mat::Zero(p * p, p * p);
  for (const Mat& aj : a) {
    const Mat at = aj.transpose();
    const Mat as = aj.adjoint();
    for (Eigen::Index i = 0; i < p; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) m.block(i * p, j * p, p, p) += at(i, j) * as;
    }
  }
  return m;
}

inline Mat unvec(const Vec& v, Eigen::Index p) {
  return Eigen::Map<const Mat>(v.data(), p, p);
}

}  // namespace detail

inline double stein_residual(const OutputPair& pair, const Mat& g) {
  return norm2(g - pair.C.adjoint() * pair.C - cp_map(pair.A, g));
}

/// Fixed point of G = C*C + sum A_j* G A_j. Small states use doubling on the
/// superoperator (G_{2N} from G_N); larger ones iterate the map directly.
inline Mat gramian(const OutputPair& pair, double tol = 1e-12, int max_iter = 100000) {
  const Eigen::Index p = pair.p();
  if (p == 0) return Mat(0, 0);
  const Mat c0 = pair.C.adjoint() * pair.C;
  Mat g;
  bool converged = false;
  if (p <= 16) {
    Mat m = detail::cp_superoperator(pair.A);
    Vec s = Eigen::Map<const Vec>(c0.data(), p * p);
    int steps = 0;
    for (int covered = 1; covered < max_iter && steps < 64; covered *= 2, ++steps) {
      Vec inc = m * s;
      s += inc;
      m = m * m;
      if (inc.norm() <= 1e-17 * std::max(1.0, s.norm())) {
        converged = true;
        break;
      }
      if (!std::isfinite(s.norm()) || s.norm() > 1e150) break;
    }
    g = hermitian_part(detail::unvec(s, p));
    if (converged) {
      // a couple of plain sweeps remove the doubling round-off
      for (int k = 0; k < 2; ++k) g = hermitian_part(c0 + cp_map(pair.A, g));
    }
  } else {
    g = c0;
    for (int k = 0; k < max_iter; ++k) {
      Mat next = hermitian_part(c0 + cp_map(pair.A, g));
      const double delta = norm2(next - g);
      g = std::move(next);
      if (delta <= 1e-3 * tol * std::max(1.0, norm2(g))) {
        converged = true;
        break;
      }
      if (!std::isfinite(delta)) break;
    }
  }
  const double res = converged ? stein_residual(pair, g) : INFINITY;
  if (!converged || !(res <= tol * std::max(1.0, norm2(g)))) {
    throw DivergenceError("gramian: Stein iteration did not converge (pair not output-stable at tol " +
                          std::to_string(tol) + ")");
  }
  return g;
}

/// (C H^{-1/2}, H^{1/2} A_j H^{-1/2}) with H the gramian; the result is an
/// isometric pair annihilating the same polynomials.
inline OutputPair renormalize_exactly_observable(const OutputPair& pair, double tol = kDefaultTol) {
  const Mat h = gramian(pair);
  const double lo = hermitian_min_eig(h);
  if (!(lo > tol)) {
    throw NotExactlyObservable("gramian has minimum eigenvalue " + std::to_string(lo) +
                               "; pair is not exactly observable");
  }
  const Mat root = psd_sqrt(h);
  const Mat inv_root = psd_inv_sqrt(h);
  std::vector<Mat> a;
  for (const Mat& aj : pair.A) a.push_back(root * aj * inv_root);
  return OutputPair(pair.C * inv_root, std::move(a));
}

}  // namespace arveson
