#pragma once

// De Branges-Rovnyak kernels K_S, the output-pair kernel K_{C,A}, the defect
// decomposition relating them through I - UU*, the subspace D, and weak
// coisometry certificates.

#include <functional>
#include <string>
#include <vector>

#include "arveson/colligation.hpp"
#include "arveson/observability.hpp"
#include "arveson/sampling.hpp"

namespace arveson {

using Evaluator = std::function<Mat(const Point&)>;

inline Evaluator evaluator_of(const Colligation& col) {
  return [col](const Point& l) { return transfer_eval(col, l); };
}

inline Evaluator evaluator_of(const TruncatedSeries& s) {
  return [s](const Point& l) { return s.evaluate(l); };
}

inline Mat kernel_KS(const Evaluator& s, const Point& lambda, const Point& zeta) {
  const Mat sl = s(lambda);
  const Mat sz = s(zeta);
  if (sl.rows() != sz.rows() || sl.cols() != sz.cols()) throw ShapeError("kernel_KS: evaluator shape changed");
  const Mat id = Mat::Identity(sl.rows(), sl.rows());
  return (id - sl * sz.adjoint()) / (1.0 - ball_inner(lambda, zeta));
}

inline Mat kernel_KCA(const OutputPair& pair, const Point& lambda, const Point& zeta) {
  return observability_row(pair, lambda) * observability_row(pair, zeta).adjoint();
}

/// Scalar Szego-type kernel 1/(1 - <l, z>).
inline Scalar szego_kernel(const Point& lambda, const Point& zeta) {
  return 1.0 / (1.0 - ball_inner(lambda, zeta));
}

struct DefectDecomposition {
  Mat KS;
  Mat KCA;
  Mat residual;
  double identity_error = 0.0;
  bool contractive = true;
  bool residual_psd = true;  // only meaningful on diagonal pairs
};

/// K_S = K_{C,A} + G(l) (I - UU*) G(z)^* / (1 - <l, z>),
/// G(l) = [C (I - Z(l)A)^{-1} Z(l), I_Y].
inline DefectDecomposition defect_decomposition(const Colligation& col, const Point& lambda,
                                                const Point& zeta, double tol = kDefaultTol) {
  DefectDecomposition out;
  const Mat u = col.matrix();
  out.contractive = norm2(u) <= 1.0 + tol;
  const OutputPair pair = col.pair();
  const Eigen::Index p = col.p();
  const Eigen::Index r = col.r();
  auto g_of = [&](const Point& x) {
    Mat g(r, col.d * p + r);
    g << observability_row(pair, x) * z_row(x, p), Mat::Identity(r, r);
    return g;
  };
  const Mat gl = g_of(lambda);
  const Mat gz = g_of(zeta);
  const Mat defect = Mat::Identity(u.rows(), u.rows()) - u * u.adjoint();
  out.residual = gl * defect * gz.adjoint() / (1.0 - ball_inner(lambda, zeta));
  out.KS = kernel_KS(evaluator_of(col), lambda, zeta);
  out.KCA = kernel_KCA(pair, lambda, zeta);
  out.identity_error = norm2(out.KS - out.KCA - out.residual);
  if (out.contractive && (lambda - zeta).norm() == 0.0) {
    out.residual_psd = hermitian_min_eig(hermitian_part(out.residual)) >= -tol;
  }
  return out;
}

struct DSubspace {
  Mat basis;  // (d p) x k, orthonormal columns, slot-major layout
  std::string method = "series";
  int degree_used = 0;
  double tail = 0.0;             // decay measure at the last degree generated
  bool inconclusive = false;
  double sampled_distance = 0.0; // principal-angle sine vs. the sampled span
  bool sampled_agrees = true;

  Eigen::Index dim() const { return basis.cols(); }
  Eigen::Index ambient() const { return basis.rows(); }
  Mat complement() const { return complement_basis(basis, basis.rows()); }
};

/// Z(z)^* F(z)^* for the pair, a (d p) x r matrix whose columns span D.
inline Mat d_generators_at(const OutputPair& pair, const Point& zeta) {
  return z_row(zeta, pair.p()).adjoint() * observability_row(pair, zeta).adjoint();
}

/// Span of Z(z)^* (I - A^* Z(z)^*)^{-1} C^* y over z in the ball and y in Y,
/// generated coefficientwise: h_m(y) = sum_j E_j W_{m-e_j}^* y.
inline DSubspace d_subspace(const OutputPair& pair, int cap, double tol = kDefaultTol,
                            std::uint64_t seed = kDefaultSeed) {
  const int d = pair.d;
  const Eigen::Index p = pair.p();
  const Eigen::Index r = pair.r();
  DSubspace out;
  if (p == 0 || r == 0) {
    out.basis = Mat(d * p, 0);
    return out;
  }
  const TruncatedSeries w = word_series(pair, std::max(cap - 1, 0));
  const double scale = std::max(norm2(pair.C), 1e-300);
  Mat span(d * p, 0);
  bool decayed = false;
  for (int k = 1; k <= cap; ++k) {
    double level = 0.0;
    for (const MultiIndex& n : indices_of_degree(d, k - 1)) {
      level = std::max(level, norm2(w.coeff(n)) / std::sqrt(static_cast<double>(weight(n))));
    }
    out.tail = level / scale;
    out.degree_used = k;
    if (out.tail < 1e-12) {
      decayed = true;
      break;
    }
    const auto layer = indices_of_degree(d, k);
    Mat all(d * p, span.cols() + static_cast<Eigen::Index>(layer.size()) * r);
    all.leftCols(span.cols()) = span;
    Eigen::Index at = span.cols();
    for (const MultiIndex& m : layer) {
      Mat h = Mat::Zero(d * p, r);
      for (int j = 0; j < d; ++j) {
        if (m[j] == 0) continue;
        h.middleRows(j * p, p) += w.coeff(m.minus_unit(j)).adjoint();
      }
      all.middleCols(at, r) = h / std::sqrt(static_cast<double>(weight(m)));
      at += r;
    }
    span = orth(all, kRankRelTol);
    if (span.cols() == d * p) {
      decayed = true;
      break;
    }
  }
  out.basis = canonical_basis(span);
  out.inconclusive = !decayed;

  // sampled cross-check
  Rng rng(seed);
  const int npts = std::max<int>(2 * static_cast<int>(out.dim()), 2);
  Mat sampled(d * p, static_cast<Eigen::Index>(npts) * r);
  for (int i = 0; i < npts; ++i) {
    sampled.middleCols(static_cast<Eigen::Index>(i) * r, r) = d_generators_at(pair, random_ball_point(rng, d, 0.7));
  }
  const Mat qs = orth(sampled, kRankRelTol);
  out.sampled_distance = subspace_distance(out.basis, qs);
  out.sampled_agrees = out.sampled_distance <= std::max(tol, 1e-8);
  return out;
}

struct WeakCoisometryReport {
  bool pass = false;
  bool contractive = false;
  double defect = 0.0;
  double global_defect = 0.0;  // ||I - UU*||
};

/// ||P^*(I - UU^*)P|| with P the embedding of D (+) Y.
inline WeakCoisometryReport weakly_coisometric_check(const Colligation& col, const DSubspace& dsub,
                                                     double tol = kDefaultTol) {
  if (dsub.ambient() != col.d * col.p()) {
    throw ShapeError("D subspace lives in dimension " + std::to_string(dsub.ambient()) + ", colligation needs " +
                     std::to_string(col.d * col.p()));
  }
  const Mat u = col.matrix();
  const Eigen::Index k = dsub.dim();
  const Eigen::Index r = col.r();
  Mat emb = Mat::Zero(u.rows(), k + r);
  emb.topLeftCorner(dsub.ambient(), k) = dsub.basis;
  emb.bottomRightCorner(r, r) = Mat::Identity(r, r);
  const Mat defect = Mat::Identity(u.rows(), u.rows()) - u * u.adjoint();
  WeakCoisometryReport rep;
  rep.contractive = norm2(u) <= 1.0 + tol;
  rep.defect = norm2(emb.adjoint() * defect * emb);
  rep.global_defect = norm2(defect);
  rep.pass = rep.contractive && rep.defect <= tol;
  return rep;
}

struct KernelGrid {
  std::vector<Point> points;
  std::vector<std::vector<Mat>> values;  // values[i][j] = K(points[i], points[j])
  std::string which;

  static KernelGrid build(const std::vector<Point>& pts,
                          const std::function<Mat(const Point&, const Point&)>& k, std::string tag) {
    KernelGrid g;
    g.points = pts;
    g.which = std::move(tag);
    g.values.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = 0; j < pts.size(); ++j) g.values[i].push_back(k(pts[i], pts[j]));
    }
    return g;
  }

  /// max ||K(l_i, l_j) - K(l_j, l_i)^*||
  double hermitian_defect() const {
    double m = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      for (std::size_t j = 0; j < values.size(); ++j) m = std::max(m, norm2(values[i][j] - values[j][i].adjoint()));
    }
    return m;
  }
};

struct PsdReport {
  double min_eig = 0.0;
  bool psd = false;
};

inline PsdReport kernel_psd_check(const KernelGrid& grid, double tol = kDefaultTol) {
  PsdReport rep;
  const std::size_t n = grid.points.size();
  if (n == 0) {
    rep.psd = true;
    return rep;
  }
  const Eigen::Index b = grid.values[0][0].rows();
  Mat gram(static_cast<Eigen::Index>(n) * b, static_cast<Eigen::Index>(n) * b);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      gram.block(static_cast<Eigen::Index>(i) * b, static_cast<Eigen::Index>(j) * b, b, b) = grid.values[i][j];
    }
  }
  rep.min_eig = hermitian_min_eig(hermitian_part(gram));
  rep.psd = rep.min_eig >= -tol;
  return rep;
}

}  // namespace arveson
