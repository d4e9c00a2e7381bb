#pragma once

// Commutative row contractions T = [T_1 ... T_d], their Halmos unitary
// dilation, the characteristic function, purity, and the conditions under
// which a colligation's transfer function coincides with one.

#include <functional>
#include <vector>

#include "arveson/colligation.hpp"
#include "arveson/sampling.hpp"

namespace arveson {

inline constexpr double kPurityTol = 1e-8;

struct RowContraction {
  int d = 0;
  std::vector<Mat> T;

  RowContraction() = default;
  explicit RowContraction(std::vector<Mat> t, double tol = kDefaultTol) : d(static_cast<int>(t.size())), T(std::move(t)) {
    if (d < 1) throw ShapeError("row contraction needs d >= 1");
    for (const Mat& tj : T) {
      if (tj.rows() != T.front().rows() || tj.cols() != T.front().rows()) {
        throw ShapeError("row contraction blocks must be square of one size");
      }
    }
    const double n = norm2(row());
    if (n > 1.0 + tol) throw NotContractive("||[T_1 ... T_d]|| = " + std::to_string(n) + " > 1");
  }

  Eigen::Index p() const { return T.front().rows(); }

  Mat row() const {
    Mat r(p(), d * p());
    for (int j = 0; j < d; ++j) r.middleCols(j * p(), p()) = T[static_cast<std::size_t>(j)];
    return r;
  }

  double max_commutator() const {
    double m = 0.0;
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        m = std::max(m, norm2(T[static_cast<std::size_t>(i)] * T[static_cast<std::size_t>(j)] -
                              T[static_cast<std::size_t>(j)] * T[static_cast<std::size_t>(i)]));
      }
    }
    return m;
  }
  bool commutative(double tol = kDefaultTol) const { return max_commutator() <= tol; }
};

namespace detail {

struct DefectData {
  Mat trow;    // p x dp
  Mat j_t;     // basis of D_T in C^{dp}
  Mat j_ts;    // basis of D_{T*} in C^p
  Mat dt;      // (I - T*T)^{1/2}
  Mat dts;     // (I - TT*)^{1/2}
};

inline DefectData defects(const RowContraction& t, double tol) {
  DefectData dd;
  dd.trow = t.row();
  const Mat mt = Mat::Identity(dd.trow.cols(), dd.trow.cols()) - dd.trow.adjoint() * dd.trow;
  const Mat mts = Mat::Identity(dd.trow.rows(), dd.trow.rows()) - dd.trow * dd.trow.adjoint();
  dd.dt = psd_sqrt(mt);
  dd.dts = psd_sqrt(mts);
  dd.j_t = psd_range_basis(mt, tol * std::max(1.0, norm2(mt)));
  dd.j_ts = psd_range_basis(mts, tol * std::max(1.0, norm2(mts)));
  return dd;
}

}  // namespace detail

/// A = T^*, B = D_T J_T, C = J_{T*}^* D_{T*}, D = -J_{T*}^* T J_T, with the
/// defect spaces realized by eigen-thresholding.
inline Colligation halmos_dilation(const RowContraction& t, double tol = kDefaultTol) {
  const detail::DefectData dd = detail::defects(t, tol);
  const Eigen::Index p = t.p();
  std::vector<Mat> a, b;
  const Mat bb = dd.dt * dd.j_t;
  for (int j = 0; j < t.d; ++j) {
    a.push_back(t.T[static_cast<std::size_t>(j)].adjoint());
    b.push_back(bb.middleRows(j * p, p));
  }
  return Colligation(std::move(a), std::move(b), dd.j_ts.adjoint() * dd.dts, -dd.j_ts.adjoint() * dd.trow * dd.j_t);
}

/// theta_T(l) = J_{T*}^* [-T + D_{T*} (I - Z(l)T^*)^{-1} Z(l) D_T] J_T,
/// evaluated directly from T.
inline std::function<Mat(const Point&)> characteristic_function(const RowContraction& t, double tol = kDefaultTol) {
  const detail::DefectData dd = detail::defects(t, tol);
  const Eigen::Index p = t.p();
  return [dd, p](const Point& lambda) {
    const Mat z = z_row(lambda, p);
    const Mat m = Mat::Identity(p, p) - z * dd.trow.adjoint();
    Eigen::PartialPivLU<Mat> lu(m);
    if (p > 0 && !(lu.rcond() > 1e-14)) throw SingularResolvent("I - Z(l)T^* singular at l = " + point_str(lambda));
    const Mat full = -dd.trow + dd.dts * lu.solve(z * dd.dt);
    return Mat(dd.j_ts.adjoint() * full * dd.j_t);
  };
}

struct PurityReport {
  bool pure = false;
  double sigma_max = 0.0;
};

/// No unit vector attains ||S(0)u|| = 1, decided as sigma_max <= 1 - tol.
inline PurityReport pure_check(const Mat& s0, double tol = kPurityTol) {
  PurityReport r;
  r.sigma_max = norm2(s0);
  r.pure = r.sigma_max <= 1.0 - tol;
  return r;
}

struct CoincidenceReport {
  bool unitary = false;
  bool commutative = false;
  bool pure = false;
  bool coincides = false;
  bool b_injective = false;       // (i)
  bool c_adjoint_injective = false;  // (ii)
  bool d_strict = false;          // (iii)
  bool trio_agrees = true;        // asserted only for unitary colligations
  double unitarity_defect = 0.0;
  double commutator = 0.0;
  double sigma_max_d = 0.0;
};

inline CoincidenceReport coincidence_conditions(const Colligation& col, double tol = kDefaultTol,
                                                double purity_tol = kPurityTol) {
  CoincidenceReport rep;
  const StructureReport sr = structure_report(col, tol);
  rep.unitary = sr.unitary;
  rep.unitarity_defect = std::max(sr.isometry_residual, sr.coisometry_residual);
  rep.commutator = sr.commutator;
  rep.commutative = sr.commutative_A;
  const PurityReport pr = pure_check(col.D, purity_tol);
  rep.pure = pr.pure;
  rep.sigma_max_d = pr.sigma_max;
  rep.coincides = rep.unitary && rep.commutative && rep.pure;
  rep.b_injective = sigma_min(stack_blocks(col.B)) > purity_tol;
  rep.c_adjoint_injective = sigma_min(col.C.adjoint()) > purity_tol;
  rep.d_strict = pr.pure;
  if (rep.unitary) {
    rep.trio_agrees = rep.b_injective == rep.c_adjoint_injective && rep.c_adjoint_injective == rep.d_strict;
  }
  return rep;
}

/// T_j = V diag(t_j) V^* with sum_j |t_ij|^2 <= radius^2 < 1 for every i.
inline RowContraction random_commuting_row_contraction(Rng& rng, int d, Eigen::Index p, double radius = 0.95) {
  const Mat v = random_unitary(rng, p);
  std::vector<Mat> ts(static_cast<std::size_t>(d), Mat::Zero(p, p));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Eigen::Index i = 0; i < p; ++i) {
    Vec t(d);
    for (int j = 0; j < d; ++j) t(j) = complex_normal(rng);
    t *= radius * u(rng) / t.norm();
    for (int j = 0; j < d; ++j) ts[static_cast<std::size_t>(j)](i, i) = t(j);
  }
  for (Mat& tj : ts) tj = v * tj * v.adjoint();
  return RowContraction(std::move(ts));
}

}  // namespace arveson
