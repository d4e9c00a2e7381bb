#pragma once

// Colligations U = [A B; C D] with d state blocks, their transfer functions
// S(l) = D + C (I - Z(l)A)^{-1} Z(l)B, and structural predicates.

#include <sstream>
#include <string>
#include <vector>

#include "arveson/linalg.hpp"
#include "arveson/mindex.hpp"

namespace arveson {

/// Vertical stack [M_1; ...; M_d].
inline Mat stack_blocks(const std::vector<Mat>& ms) {
  if (ms.empty()) return Mat(0, 0);
  Eigen::Index rows = 0;
  for (const Mat& m : ms) rows += m.rows();
  Mat out(rows, ms.front().cols());
  Eigen::Index at = 0;
  for (const Mat& m : ms) {
    out.middleRows(at, m.rows()) = m;
    at += m.rows();
  }
  return out;
}

inline std::string point_str(const Point& p) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (i) os << ", ";
    os << p(i).real();
    if (p(i).imag() != 0.0) os << (p(i).imag() < 0 ? "-" : "+") << std::abs(p(i).imag()) << "i";
  }
  os << ")";
  return os.str();
}

/// Output pair (C, A): C is r x p, each A_j is p x p.
struct OutputPair {
  int d = 0;
  Mat C;
  std::vector<Mat> A;

  OutputPair() = default;
  OutputPair(Mat c, std::vector<Mat> a) : d(static_cast<int>(a.size())), C(std::move(c)), A(std::move(a)) {
    validate();
  }

  Eigen::Index p() const { return C.cols(); }
  Eigen::Index r() const { return C.rows(); }

  void validate() const {
    if (d < 1 || static_cast<int>(A.size()) != d) throw ShapeError("output pair needs d >= 1 state blocks");
    for (const Mat& a : A) {
      if (a.rows() != p() || a.cols() != p()) {
        throw ShapeError("state block " + shape_str(a) + " incompatible with C " + shape_str(C));
      }
    }
  }

  /// [A_1; ...; A_d; C], the column the pair contributes to U.
  Mat stacked() const {
    std::vector<Mat> blocks = A;
    blocks.push_back(C);
    return stack_blocks(blocks);
  }

  /// Residual of C*C + sum A_j*A_j = I.
  double isometric_residual() const {
    Mat s = stacked();
    return norm2(s.adjoint() * s - Mat::Identity(p(), p()));
  }
  bool contractive(double tol = kDefaultTol) const { return norm2(stacked()) <= 1.0 + tol; }

  double max_commutator() const {
    double m = 0.0;
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) m = std::max(m, norm2(A[i] * A[j] - A[j] * A[i]));
    }
    return m;
  }
};

struct Colligation {
  int d = 0;
  std::vector<Mat> A;  // p x p
  std::vector<Mat> B;  // p x q
  Mat C;               // r x p
  Mat D;               // r x q

  Colligation() = default;
  Colligation(std::vector<Mat> a, std::vector<Mat> b, Mat c, Mat dd)
      : d(static_cast<int>(a.size())), A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(dd)) {
    validate();
  }

  /// Split a (d p + r) x (p + q) block matrix.
  static Colligation from_matrix(int d, Eigen::Index p, const Mat& u) {
    if (d < 1 || p < 0 || u.cols() < p || u.rows() < d * p) {
      throw ShapeError("cannot split " + shape_str(u) + " with d=" + std::to_string(d) +
                       ", p=" + std::to_string(p));
    }
    const Eigen::Index q = u.cols() - p;
    const Eigen::Index r = u.rows() - d * p;
    std::vector<Mat> a, b;
    for (int j = 0; j < d; ++j) {
      a.push_back(u.block(j * p, 0, p, p));
      b.push_back(u.block(j * p, p, p, q));
    }
    return Colligation(std::move(a), std::move(b), u.block(d * p, 0, r, p), u.block(d * p, p, r, q));
  }

  Eigen::Index p() const { return C.cols(); }
  Eigen::Index q() const { return D.cols(); }
  Eigen::Index r() const { return C.rows(); }

  void validate() const {
    if (d < 1 || static_cast<int>(A.size()) != d || static_cast<int>(B.size()) != d) {
      throw ShapeError("colligation needs d >= 1 A and B blocks");
    }
    if (D.rows() != C.rows()) throw ShapeError("C " + shape_str(C) + " and D " + shape_str(D) + " disagree on outputs");
    for (int j = 0; j < d; ++j) {
      if (A[j].rows() != p() || A[j].cols() != p()) {
        throw ShapeError("A_" + std::to_string(j + 1) + " is " + shape_str(A[j]) + ", expected " +
                         std::to_string(p()) + "x" + std::to_string(p()));
      }
      if (B[j].rows() != p() || B[j].cols() != q()) {
        throw ShapeError("B_" + std::to_string(j + 1) + " is " + shape_str(B[j]) + ", expected " +
                         std::to_string(p()) + "x" + std::to_string(q()));
      }
    }
  }

  Mat matrix() const {
    Mat u(d * p() + r(), p() + q());
    for (int j = 0; j < d; ++j) {
      u.block(j * p(), 0, p(), p()) = A[j];
      u.block(j * p(), p(), p(), q()) = B[j];
    }
    u.block(d * p(), 0, r(), p()) = C;
    u.block(d * p(), p(), r(), q()) = D;
    return u;
  }

  OutputPair pair() const { return OutputPair(C, A); }
};

/// Sum_j lambda_j M_j.
inline Mat pencil(const std::vector<Mat>& ms, const Point& lambda) {
  Mat out = Mat::Zero(ms.front().rows(), ms.front().cols());
  for (std::size_t j = 0; j < ms.size(); ++j) out += lambda(static_cast<Eigen::Index>(j)) * ms[j];
  return out;
}

/// LU of I - Z(l)A, with a singularity guard.
inline Eigen::PartialPivLU<Mat> resolvent_lu(const std::vector<Mat>& a, const Point& lambda) {
  if (static_cast<Eigen::Index>(a.size()) != lambda.size()) {
    throw ShapeError("point has " + std::to_string(lambda.size()) + " coordinates, expected " +
                     std::to_string(a.size()));
  }
  const Eigen::Index p = a.front().rows();
  Mat m = Mat::Identity(p, p) - pencil(a, lambda);
  Eigen::PartialPivLU<Mat> lu(m);
  if (p > 0 && !(lu.rcond() > 1e-14)) {
    throw SingularResolvent("I - Z(l)A is singular at l = " + point_str(lambda));
  }
  return lu;
}

/// F(l) = C (I - Z(l)A)^{-1}.
inline Mat observability_row(const OutputPair& pair, const Point& lambda) {
  if (pair.p() == 0) return Mat(pair.r(), 0);
  resolvent_lu(pair.A, lambda);  // singularity guard
  // C M^{-1} = (M^{-T} C^T)^T
  const Mat mt = (Mat::Identity(pair.p(), pair.p()) - pencil(pair.A, lambda)).transpose();
  return Eigen::PartialPivLU<Mat>(mt).solve(pair.C.transpose()).transpose();
}

inline Mat transfer_eval(const Colligation& col, const Point& lambda) {
  if (col.p() == 0) return col.D;
  auto lu = resolvent_lu(col.A, lambda);
  return col.D + col.C * lu.solve(pencil(col.B, lambda));
}

/// Coefficients W_n of C (I - Z(l)A)^{-1}: W_0 = C, W_n = sum_j W_{n-e_j} A_j.
/// For commuting A this is weight(n) C A^n.
inline TruncatedSeries word_series(const OutputPair& pair, int cap) {
  TruncatedSeries w(pair.d, cap, pair.r(), pair.p());
  w.set(MultiIndex::zero(pair.d), pair.C);
  for (const MultiIndex& n : indices_up_to(pair.d, cap)) {
    if (n.total() == 0) continue;
    Mat acc = Mat::Zero(pair.r(), pair.p());
    for (int j = 0; j < pair.d; ++j) {
      if (n[j] == 0) continue;
      acc += w.coeff(n.minus_unit(j)) * pair.A[j];
    }
    w.set(n, acc);
  }
  return w;
}

/// Taylor coefficients S_0 = D, S_n = sum_j W_{n-e_j} B_j.
inline TruncatedSeries taylor(const Colligation& col, int cap) {
  TruncatedSeries s(col.d, cap, col.r(), col.q());
  s.set(MultiIndex::zero(col.d), col.D);
  if (cap == 0) return s;
  TruncatedSeries w = word_series(col.pair(), cap - 1);
  for (const MultiIndex& n : indices_up_to(col.d, cap)) {
    if (n.total() == 0) continue;
    Mat acc = Mat::Zero(col.r(), col.q());
    for (int j = 0; j < col.d; ++j) {
      if (n[j] == 0) continue;
      acc += w.coeff(n.minus_unit(j)) * col.B[j];
    }
    s.set(n, acc);
  }
  return s;
}

struct StructureReport {
  bool contractive = false;
  bool isometric = false;
  bool coisometric = false;
  bool unitary = false;
  bool commutative_A = false;
  double sigma_max = 0.0;
  double isometry_residual = 0.0;
  double coisometry_residual = 0.0;
  double commutator = 0.0;
};

inline StructureReport structure_report(const Colligation& col, double tol = kDefaultTol) {
  const Mat u = col.matrix();
  StructureReport r;
  r.sigma_max = norm2(u);
  r.isometry_residual = norm2(u.adjoint() * u - Mat::Identity(u.cols(), u.cols()));
  r.coisometry_residual = norm2(u * u.adjoint() - Mat::Identity(u.rows(), u.rows()));
  r.commutator = col.pair().max_commutator();
  r.contractive = r.sigma_max <= 1.0 + tol;
  r.isometric = r.isometry_residual <= tol;
  r.coisometric = r.coisometry_residual <= tol;
  r.unitary = r.isometric && r.coisometric;
  r.commutative_A = r.commutator <= tol;
  return r;
}

/// Append (I - UU*)^{1/2} J as new input columns, J the canonical basis of
/// the eigenspace of I - UU* above tol. The result is coisometric.
inline Colligation coisometric_extension(const Colligation& col, double tol = kDefaultTol) {
  const Mat u = col.matrix();
  const double smax = norm2(u);
  if (smax > 1.0 + tol) {
    throw NotContractive("coisometric_extension: ||U|| = " + std::to_string(smax) + " > 1");
  }
  const Mat defect = Mat::Identity(u.rows(), u.rows()) - u * u.adjoint();
  const Mat extra = psd_range_factor(defect, tol);
  Mat ext(u.rows(), u.cols() + extra.cols());
  ext << u, extra;
  return Colligation::from_matrix(col.d, col.p(), ext);
}

/// Block rows C A_w over all words w of length <= cap (A_w = A_{w_1}...A_{w_k}).
inline Mat word_observability(const OutputPair& pair, int cap) {
  std::vector<Mat> level{pair.C};
  std::vector<Mat> rows{pair.C};
  for (int k = 1; k <= cap; ++k) {
    std::vector<Mat> next;
    next.reserve(level.size() * static_cast<std::size_t>(pair.d));
    for (const Mat& w : level) {
      for (int j = 0; j < pair.d; ++j) next.push_back(w * pair.A[j]);
    }
    rows.insert(rows.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return stack_blocks(rows);
}

struct EquivalenceResult {
  bool equivalent = false;
  Mat witness;
  double residual = 0.0;
  double unitarity_defect = 0.0;
  double intertwining = 0.0;
};

/// Decides whether (C2, A2) = (C1 W, W* A1 W) for a unitary W, from the
/// word-stacked observability matrices. The system is solved in both
/// directions; reported defects are the worse of the two.
inline EquivalenceResult unitary_equivalence(const OutputPair& p1, const OutputPair& p2, int cap,
                                             double tol = kDefaultTol) {
  if (p1.d != p2.d || p1.r() != p2.r() || p1.p() != p2.p()) {
    throw ShapeError("unitary_equivalence: pairs have different shapes");
  }
  const Mat o1 = word_observability(p1, cap);
  const Mat o2 = word_observability(p2, cap);
  const Eigen::Index p = p1.p();
  const Mat id = Mat::Identity(p, p);
  for (const Mat* o : {&o1, &o2}) {
    if (p > 0 && sigma_min(*o) <= kRankRelTol * norm2(*o)) {
      throw InconclusiveError("observability matrix rank-deficient at word length " +
                              std::to_string(cap) + "; raise the cap");
    }
  }
  EquivalenceResult res;
  if (p == 0) {
    res.equivalent = true;
    res.witness = Mat(0, 0);
    return res;
  }
  Eigen::CompleteOrthogonalDecomposition<Mat> d1(o1), d2(o2);
  const Mat w = d1.solve(o2);
  const Mat wr = d2.solve(o1);
  res.witness = w;
  res.residual = std::max(norm2(o1 * w - o2), norm2(o2 * wr - o1));
  res.unitarity_defect = std::max(norm2(w.adjoint() * w - id), norm2(wr.adjoint() * wr - id));
  double inter = norm2(p1.C * w - p2.C);
  for (int j = 0; j < p1.d; ++j) inter = std::max(inter, norm2(p1.A[j] * w - w * p2.A[j]));
  res.intertwining = inter;
  res.equivalent = res.residual <= tol && res.unitarity_defect <= tol && res.intertwining <= tol;
  return res;
}

}  // namespace arveson
