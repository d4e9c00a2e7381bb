#pragma once

// Dense complex linear algebra shared by every module: scalar/matrix aliases,
// the error hierarchy, and a handful of Hermitian / subspace utilities.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace arveson {

using Scalar = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;

/// A point of C^d.
using Point = Eigen::VectorXcd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class DegreeTooLarge : public Error {
 public:
  using Error::Error;
};

class SingularResolvent : public Error {
 public:
  using Error::Error;
};

class NotContractive : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class NotExactlyObservable : public Error {
 public:
  using Error::Error;
};

class InconclusiveError : public Error {
 public:
  using Error::Error;
};

class ModelInconsistency : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class OutsideBall : public Error {
 public:
  using Error::Error;
};

inline constexpr double kDefaultTol = 1e-10;

/// Relative threshold used for numerical rank decisions on singular values.
inline constexpr double kRankRelTol = 1e-10;

inline std::string shape_str(const Mat& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

/// Spectral norm; 0 for empty matrices.
inline double norm2(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

inline RealVec singular_values(const Mat& m) {
  if (m.size() == 0) return RealVec(0);
  Eigen::BDCSVD<Mat> svd(m);
  return svd.singularValues();
}

/// Smallest singular value taken over min(rows, cols) values; +inf when the
/// matrix has no columns (an injective map from the zero space).
inline double sigma_min(const Mat& m) {
  if (m.cols() == 0) return std::numeric_limits<double>::infinity();
  if (m.rows() < m.cols()) return 0.0;
  RealVec s = singular_values(m);
  return s(s.size() - 1);
}

inline double hermitian_min_eig(const Mat& h) {
  if (h.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  return es.eigenvalues()(0);
}

inline Mat hermitian_part(const Mat& m) { return (m + m.adjoint()) / 2.0; }

/// Principal square root of a Hermitian PSD matrix. Eigenvalues below zero
/// (rounding) are clamped.
inline Mat psd_sqrt(const Mat& h) {
  if (h.rows() == 0) return Mat(0, 0);
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h));
  RealVec ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

/// H^{-1/2} for Hermitian positive definite H.
inline Mat psd_inv_sqrt(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h));
  RealVec ev = es.eigenvalues().cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

/// Orthonormal basis for the column span of `m`, rank decided by singular
/// values above rel_tol * sigma_max (and above abs_floor).
inline Mat orth(const Mat& m, double rel_tol = kRankRelTol,
                double abs_floor = 1e-14) {
  if (m.cols() == 0 || m.rows() == 0) return Mat(m.rows(), 0);
  Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeThinU);
  const RealVec& s = svd.singularValues();
  const double thr = std::max(rel_tol * s(0), abs_floor);
  Eigen::Index k = 0;
  while (k < s.size() && s(k) > thr) ++k;
  return svd.matrixU().leftCols(k);
}

/// Orthonormal basis of the null space of `m` (right kernel).
inline Mat null_space(const Mat& m, double rel_tol = kRankRelTol,
                      double abs_floor = 1e-14) {
  const Eigen::Index n = m.cols();
  if (n == 0) return Mat(0, 0);
  if (m.rows() == 0) return Mat::Identity(n, n);
  Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeFullV);
  const RealVec& s = svd.singularValues();
  const double thr = std::max(rel_tol * (s.size() ? s(0) : 0.0), abs_floor);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > thr) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

/// Canonical orthonormal basis of span(Q) (Q with orthonormal columns):
/// Gram-Schmidt over the projections of e_1, e_2, ... in order. The result
/// spans the same space but is independent of the rotation inside Q, and
/// picks monomial-aligned vectors whenever the subspace contains them.
inline Mat canonical_basis(const Mat& q) {
  const Eigen::Index n = q.rows();
  const Eigen::Index k = q.cols();
  Mat out(n, k);
  Eigen::Index found = 0;
  for (Eigen::Index i = 0; i < n && found < k; ++i) {
    Vec v = q * q.row(i).adjoint();  // P e_i
    for (Eigen::Index j = 0; j < found; ++j) {
      v -= out.col(j) * out.col(j).dot(v);
    }
    for (Eigen::Index j = 0; j < found; ++j) {
      v -= out.col(j) * out.col(j).dot(v);
    }
    const double nv = v.norm();
    if (nv > 1e-8) {
      out.col(found++) = v / nv;
    }
  }
  if (found < k) {
    // Not reachable for an orthonormal Q, but keep the span complete.
    return q;
  }
  return out;
}

/// Orthonormal basis of the orthogonal complement of span(Q) in C^n.
inline Mat complement_basis(const Mat& q, Eigen::Index n) {
  if (q.cols() == 0) return Mat::Identity(n, n);
  Mat p = Mat::Identity(n, n) - q * q.adjoint();
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(p));
  Mat out(n, n - q.cols());
  Eigen::Index c = 0;
  for (Eigen::Index i = n - 1; i >= 0 && c < out.cols(); --i) {
    out.col(c++) = es.eigenvectors().col(i);
  }
  return canonical_basis(out);
}

/// Canonical orthonormal basis of the eigenspace of a Hermitian matrix with
/// eigenvalues above thr (its numerical range when the matrix is PSD).
inline Mat psd_range_basis(const Mat& m, double thr) {
  const Eigen::Index n = m.rows();
  if (n == 0) return Mat(0, 0);
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(m));
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (es.eigenvalues()(i) > thr) keep.push_back(i);
  }
  Mat v(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    v.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]);
  }
  return canonical_basis(v);
}

/// Factor of a PSD matrix restricted to its numerical range: L = M^{1/2} J
/// with J = psd_range_basis(M, thr). L L^* = M up to the discarded eigenvalues.
inline Mat psd_range_factor(const Mat& m, double thr) {
  if (m.rows() == 0) return Mat(0, 0);
  return psd_sqrt(m) * psd_range_basis(m, thr);
}

/// Largest sine of the principal angles between two subspaces given by
/// orthonormal bases. Returns 1 when the dimensions differ.
inline double subspace_distance(const Mat& q1, const Mat& q2) {
  if (q1.cols() != q2.cols()) return 1.0;
  if (q1.cols() == 0) return 0.0;
  Mat r = q2 - q1 * (q1.adjoint() * q2);
  return norm2(r);
}

inline Scalar ball_inner(const Point& lambda, const Point& zeta) {
  // <lambda, zeta> = sum lambda_j conj(zeta_j)
  return zeta.dot(lambda);
}

/// Z(lambda) = [lambda_1 I_p, ..., lambda_d I_p].
inline Mat z_row(const Point& lambda, Eigen::Index p) {
  const Eigen::Index d = lambda.size();
  Mat z = Mat::Zero(p, d * p);
  for (Eigen::Index j = 0; j < d; ++j) {
    z.block(0, j * p, p, p) = lambda(j) * Mat::Identity(p, p);
  }
  return z;
}

}  // namespace arveson
