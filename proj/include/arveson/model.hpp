#pragma once

// Functional-model side for polynomial multipliers: the Gram of M_S on
// monomials, the partial-isometry test, H(K_S) as a subspace of polynomials,
// Gleason (backward-shift) model pairs, the B-parametrization of weakly
// coisometric realizations, and the representer constructor.

#include <optional>
#include <string>
#include <vector>

#include "arveson/colligation.hpp"
#include "arveson/kernels.hpp"
#include "arveson/observability.hpp"
#include "arveson/sampling.hpp"

namespace arveson {

/// Raised when a backward-shift image leaves the subspace.
class NonInvariantError : public Error {
 public:
  NonInvariantError(Eigen::Index basis_index, int axis, double residual)
      : Error("subspace is not invariant under M*_" + std::to_string(axis + 1) + ": image of basis vector " +
              std::to_string(basis_index) + " leaves it (residual " + std::to_string(residual) + ")"),
        basis_index_(basis_index),
        axis_(axis),
        residual_(residual) {}
  Eigen::Index basis_index() const { return basis_index_; }
  int axis() const { return axis_; }
  double residual() const { return residual_; }

 private:
  Eigen::Index basis_index_;
  int axis_;
  double residual_;
};

inline Eigen::Index count_indices(int d, int cap) {
  return static_cast<Eigen::Index>(indices_up_to(d, cap).size());
}

/// Row vector of sqrt(w_n) l^n over indices up to cap, expanded over r
/// components: maps orthonormal coordinates to the value at l.
inline Mat coord_evaluation(const Point& lambda, int cap, Eigen::Index r) {
  const int d = static_cast<int>(lambda.size());
  const auto idx = indices_up_to(d, cap);
  Mat ev = Mat::Zero(r, static_cast<Eigen::Index>(idx.size()) * r);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    Scalar mono(1.0, 0.0);
    for (int j = 0; j < d; ++j) {
      for (int e = 0; e < idx[k][j]; ++e) mono *= lambda(j);
    }
    mono *= std::sqrt(static_cast<double>(weight(idx[k])));
    for (Eigen::Index i = 0; i < r; ++i) ev(i, static_cast<Eigen::Index>(k) * r + i) = mono;
  }
  return ev;
}

/// A subspace of Y-valued polynomials of degree <= cap, held as orthonormal
/// columns in the coordinates of to_coords.
struct FunctionSubspace {
  int d = 0;
  Eigen::Index r = 0;
  int cap = 0;
  Mat basis;

  Eigen::Index size() const { return basis.cols(); }

  static FunctionSubspace from_coords(int d, Eigen::Index r, int cap, const Mat& q) {
    FunctionSubspace s;
    s.d = d;
    s.r = r;
    s.cap = cap;
    s.basis = q;
    return s;
  }

  static FunctionSubspace from_spanning(const std::vector<TruncatedSeries>& fs, int cap) {
    if (fs.empty()) throw ShapeError("from_spanning: no functions");
    const int d = fs.front().dims();
    const Eigen::Index r = fs.front().rows();
    Mat cols(count_indices(d, cap) * r, static_cast<Eigen::Index>(fs.size()));
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (fs[i].dims() != d || fs[i].rows() != r) throw ShapeError("from_spanning: mixed shapes");
      cols.col(static_cast<Eigen::Index>(i)) = to_coords(fs[i].truncated(cap), cap);
    }
    return from_coords(d, r, cap, canonical_basis(orth(cols)));
  }

  TruncatedSeries element(Eigen::Index i) const { return arveson::from_coords(basis.col(i), d, cap, r); }

  /// Reproducing kernel of the subspace, sum_i phi_i(l) phi_i(z)^*.
  Mat kernel(const Point& lambda, const Point& zeta) const {
    const Mat el = coord_evaluation(lambda, cap, r) * basis;
    const Mat ez = coord_evaluation(zeta, cap, r) * basis;
    return el * ez.adjoint();
  }

  /// Distance of coordinates v from the subspace.
  double distance(const Vec& v) const { return (v - basis * (basis.adjoint() * v)).norm(); }

  Mat gram() const { return basis.adjoint() * basis; }
};

struct MultiplierGram {
  int in_cap = 0;
  int out_cap = 0;
  Mat matrix;  // M_S from inputs of degree <= in_cap to outputs of degree <= out_cap
  Mat gram;    // M_S^* M_S on inputs of degree <= in_cap
};

/// M_S in orthonormal monomial coordinates: entry ((n,i),(m,k)) is
/// sqrt(w_m / w_n) (S_{n-m})_{ik}.
inline Mat multiplier_matrix(const TruncatedSeries& s, int in_cap, int out_cap) {
  const int d = s.dims();
  const Eigen::Index r = s.rows();
  const Eigen::Index q = s.cols();
  const auto in_idx = indices_up_to(d, in_cap);
  std::map<MultiIndex, Eigen::Index> pos;
  {
    const auto out_idx = indices_up_to(d, out_cap);
    for (std::size_t i = 0; i < out_idx.size(); ++i) pos[out_idx[i]] = static_cast<Eigen::Index>(i);
  }
  Mat m = Mat::Zero(count_indices(d, out_cap) * r, static_cast<Eigen::Index>(in_idx.size()) * q);
  for (std::size_t a = 0; a < in_idx.size(); ++a) {
    const MultiIndex& mi = in_idx[a];
    for (const auto& [k, sk] : s.terms()) {
      const MultiIndex n = mi + k;
      if (n.total() > out_cap) continue;
      const double f = std::sqrt(static_cast<double>(weight(mi)) / static_cast<double>(weight(n)));
      m.block(pos.at(n) * r, static_cast<Eigen::Index>(a) * q, r, q) += f * sk;
    }
  }
  return m;
}

inline MultiplierGram multiplier_gram(const TruncatedSeries& s, int k) {
  MultiplierGram g;
  g.in_cap = k;
  g.out_cap = k + std::max(s.degree(), 0);
  g.matrix = multiplier_matrix(s, g.in_cap, g.out_cap);
  g.gram = g.matrix.adjoint() * g.matrix;
  return g;
}

struct PartialIsometryReport {
  bool pass = false;
  double defect = 0.0;
  int certified_degree = 0;
};

/// ||(M*M)^2 P_K - M*M P_K||, assembled on inputs up to K + deg S so the
/// composition is exact.
inline PartialIsometryReport partial_isometry_test(const TruncatedSeries& s, int k, double tol = kDefaultTol) {
  const int deg = std::max(s.degree(), 0);
  const MultiplierGram big = multiplier_gram(s, k + deg);
  const Eigen::Index nk = count_indices(s.dims(), k) * s.cols();
  const Mat g_k = big.gram.leftCols(nk);
  PartialIsometryReport rep;
  rep.defect = norm2(big.gram * g_k - g_k);
  rep.pass = rep.defect <= tol;
  rep.certified_degree = k;
  return rep;
}

/// H(K_S) within polynomials of degree <= N: the orthogonal complement of
/// {S l^m u} there, validated against K_S at sampled pairs.
inline FunctionSubspace hks_subspace(const TruncatedSeries& s, int n_cap, double tol = 1e-9,
                                     std::uint64_t seed = kDefaultSeed) {
  const int d = s.dims();
  const Eigen::Index r = s.rows();
  const Mat m = multiplier_matrix(s, n_cap, n_cap);
  const Eigen::Index dim = count_indices(d, n_cap) * r;
  const Mat ran = orth(m);
  FunctionSubspace h = FunctionSubspace::from_coords(d, r, n_cap, complement_basis(ran, dim));
  Rng rng(seed);
  const Evaluator ev = evaluator_of(s);
  double worst = 0.0;
  for (int i = 0; i < 8; ++i) {
    const Point l = random_ball_point(rng, d, 0.5);
    const Point z = random_ball_point(rng, d, 0.5);
    worst = std::max(worst, norm2(h.kernel(l, z) - kernel_KS(ev, l, z)));
  }
  if (!(worst <= tol)) {
    throw InconclusiveError("H(K_S) not captured at this degree cap; raise N (kernel mismatch " +
                            std::to_string(worst) + ")");
  }
  return h;
}

struct GleasonResult {
  OutputPair pair;
  double membership_residual = 0.0;  // worst distance of a backward-shift image
  double inequality_min_eig = 0.0;   // of I - C*C - sum A_j*A_j
  bool inequality_holds = false;
};

/// A_j = matrix of M*_{l_j} on the subspace, C = evaluation at 0.
inline GleasonResult gleason_model_pair(const FunctionSubspace& h, double tol = 1e-9) {
  const Eigen::Index k = h.size();
  const Eigen::Index r = h.r;
  std::vector<Mat> a(static_cast<std::size_t>(h.d), Mat::Zero(k, k));
  Mat c(r, k);
  GleasonResult res;
  for (Eigen::Index i = 0; i < k; ++i) {
    const TruncatedSeries phi = h.element(i);
    c.col(i) = phi.coeff(MultiIndex::zero(h.d)).col(0);
    for (int j = 0; j < h.d; ++j) {
      const Vec v = to_coords(backward_shift(phi, j).truncated(h.cap), h.cap);
      const double dist = h.distance(v);
      res.membership_residual = std::max(res.membership_residual, dist);
      if (dist > tol) throw NonInvariantError(i, j, dist);
      a[static_cast<std::size_t>(j)].col(i) = h.basis.adjoint() * v;
    }
  }
  res.pair = OutputPair(c, a);
  Mat defect = Mat::Identity(k, k) - c.adjoint() * c;
  for (const Mat& aj : a) defect -= aj.adjoint() * aj;
  res.inequality_min_eig = hermitian_min_eig(hermitian_part(defect));
  res.inequality_holds = res.inequality_min_eig >= -tol;
  return res;
}

struct ModelRealizationFamily {
  OutputPair pair;
  DSubspace dsub;
  Mat d_perp;        // (d p) x k_perp
  Mat b_core;        // q x (d p): B* on D, zero on D-perp
  Mat u0;            // q x m0 basis of {u : S(l)u == 0}
  Mat d0;            // S(0)
  double fit_residual = 0.0;

  Eigen::Index free_rows() const { return u0.cols(); }
  Eigen::Index free_cols() const { return d_perp.cols(); }
};

inline Mat stacked_coefficients(const TruncatedSeries& s) {
  Mat out(static_cast<Eigen::Index>(s.terms().size()) * s.rows(), s.cols());
  Eigen::Index at = 0;
  for (const auto& kv : s.terms()) {
    out.middleRows(at, s.rows()) = kv.second;
    at += s.rows();
  }
  return out;
}

inline ModelRealizationFamily model_family(const TruncatedSeries& s, const FunctionSubspace& h,
                                           const OutputPair& pair, double tol = 1e-9,
                                           std::uint64_t seed = kDefaultSeed) {
  (void)h;
  const int d = s.dims();
  const Eigen::Index p = pair.p();
  const Eigen::Index r = s.rows();
  const Eigen::Index q = s.cols();
  if (pair.r() != r || pair.d != d) throw ShapeError("model_family: pair does not match the multiplier");
  ModelRealizationFamily fam;
  fam.pair = pair;
  fam.dsub = d_subspace(pair, h.cap + 2, kDefaultTol, seed);
  fam.d_perp = fam.dsub.complement();
  fam.d0 = s.coeff(MultiIndex::zero(d));
  const Mat stacked = stacked_coefficients(s);
  fam.u0 = stacked.rows() ? canonical_basis(null_space(stacked)) : Mat(Mat::Identity(q, q));

  const Eigen::Index k = fam.dsub.dim();
  if (k == 0) {
    fam.b_core = Mat::Zero(q, d * p);
    return fam;
  }
  // B^* Z(z)^* F(z)^* y = (S(z)^* - S(0)^*) y on sampled z.
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const int npts = std::max<int>(2 * static_cast<int>(k), 2);
  Mat gen(k, static_cast<Eigen::Index>(npts) * r);
  Mat rhs(q, static_cast<Eigen::Index>(npts) * r);
  for (int i = 0; i < npts; ++i) {
    const Point z = random_ball_point(rng, d, 0.7);
    gen.middleCols(static_cast<Eigen::Index>(i) * r, r) = fam.dsub.basis.adjoint() * d_generators_at(pair, z);
    rhs.middleCols(static_cast<Eigen::Index>(i) * r, r) = (s.evaluate(z) - fam.d0).adjoint();
  }
  const Mat xd = gen.transpose().completeOrthogonalDecomposition().solve(rhs.transpose()).transpose();
  fam.fit_residual = norm2(xd * gen - rhs) / std::max(1.0, norm2(rhs));
  if (!(fam.fit_residual <= tol)) {
    throw ModelInconsistency("B on D does not fit the sampled generators (residual " +
                             std::to_string(fam.fit_residual) + ")");
  }
  fam.b_core = xd * fam.dsub.basis.adjoint();
  return fam;
}

/// B^* = U0 X Dperp^* + B_core for a contraction X : D-perp -> U_S^0.
inline Colligation assemble(const ModelRealizationFamily& fam, const Mat& x, double tol = kDefaultTol) {
  const Eigen::Index m0 = fam.free_rows();
  const Eigen::Index kp = fam.free_cols();
  Mat xx = x;
  if (x.size() == 0) xx = Mat::Zero(m0, kp);
  if (xx.rows() != m0 || xx.cols() != kp) {
    throw ShapeError("free parameter must be " + std::to_string(m0) + "x" + std::to_string(kp) + ", got " +
                     shape_str(x));
  }
  const double nx = norm2(xx);
  if (nx > 1.0 + tol) throw NotContractive("free parameter has norm " + std::to_string(nx) + " > 1");
  const Mat bstar = fam.u0 * xx * fam.d_perp.adjoint() + fam.b_core;
  const Mat b = bstar.adjoint();  // (d p) x q
  const Eigen::Index p = fam.pair.p();
  std::vector<Mat> bs;
  for (int j = 0; j < fam.pair.d; ++j) bs.push_back(b.middleRows(j * p, p));
  return Colligation(fam.pair.A, std::move(bs), fam.pair.C, fam.d0);
}

struct RepresenterFamily {
  OutputPair pair;
  DSubspace dsub;
  Mat T;            // p x (k + r): [A^* Q, C^*]
  Mat defect_root;  // (I - T^*T)^{1/2}
  Mat range;        // (k + r) x rank, canonical basis of the numerical range
  Eigen::Index rank = 0;

  /// Colligation realizing [C(I - Z A)^{-1} Z Q, I](I - T*T)^{1/2} J G^*;
  /// G has orthonormal columns (u x rank).
  Colligation build(const Mat& g) const {
    if (g.cols() != rank) throw ShapeError("G must have " + std::to_string(rank) + " columns");
    if (norm2(g.adjoint() * g - Mat::Identity(rank, rank)) > 1e-9) {
      throw PreconditionError("G must have orthonormal columns");
    }
    const Eigen::Index k = dsub.dim();
    const Eigen::Index r = pair.r();
    const Eigen::Index p = pair.p();
    const Mat l = defect_root * range * g.adjoint();
    const Mat b = dsub.basis * l.topRows(k);
    std::vector<Mat> bs;
    for (int j = 0; j < pair.d; ++j) bs.push_back(b.middleRows(j * p, p));
    return Colligation(pair.A, std::move(bs), pair.C, l.bottomRows(r));
  }
  Colligation build() const { return build(Mat::Identity(rank, rank)); }
};

inline RepresenterFamily representer_family(const OutputPair& pair, double tol = kDefaultTol, int cap = 0) {
  if (pair.isometric_residual() > 1e-9) throw PreconditionError("representer_family: pair is not isometric");
  if (pair.max_commutator() > 1e-9) throw PreconditionError("representer_family: state tuple does not commute");
  if (!strong_stability(pair.A, tol).stable) {
    throw PreconditionError("representer_family: state tuple is not strongly stable");
  }
  RepresenterFamily rf;
  rf.pair = pair;
  rf.dsub = d_subspace(pair, cap > 0 ? cap : static_cast<int>(2 * pair.p() + 2), tol);
  const Eigen::Index k = rf.dsub.dim();
  const Eigen::Index r = pair.r();
  const Eigen::Index p = pair.p();
  Mat astar(p, pair.d * p);
  for (int j = 0; j < pair.d; ++j) astar.middleCols(j * p, p) = pair.A[static_cast<std::size_t>(j)].adjoint();
  rf.T = Mat(p, k + r);
  rf.T << astar * rf.dsub.basis, pair.C.adjoint();
  const Mat m = Mat::Identity(k + r, k + r) - rf.T.adjoint() * rf.T;
  rf.defect_root = psd_sqrt(m);
  rf.range = psd_range_basis(m, tol);
  rf.rank = rf.range.cols();
  return rf;
}

}  // namespace arveson
