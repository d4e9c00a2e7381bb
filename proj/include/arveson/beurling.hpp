#pragma once

// Beurling-Lax representers from homogeneous interpolation data, Cholesky
// completion of output pairs, inner certification, ball Blaschke factors,
// and an exact-arithmetic Hankel rank probe.

#include <boost/multiprecision/cpp_int.hpp>

#include <set>
#include <string>
#include <vector>

#include "arveson/colligation.hpp"
#include "arveson/kernels.hpp"
#include "arveson/model.hpp"
#include "arveson/observability.hpp"

namespace arveson {

struct InterpolationCondition {
  Point omega;        // points variant only
  Mat x;              // 1 x r functional on Y
  MultiIndex index;   // lower_inclusive variant only
};

struct InterpolationSpec {
  enum class Variant { points, jet_chain, lower_inclusive };

  Variant variant = Variant::points;
  int d = 0;
  Point omega;  // shared point for jet_chain / lower_inclusive
  std::vector<InterpolationCondition> conditions;

  Eigen::Index r() const { return conditions.empty() ? 0 : conditions.front().x.cols(); }

  static const char* variant_name(Variant v) {
    switch (v) {
      case Variant::points: return "points";
      case Variant::jet_chain: return "jet_chain";
      case Variant::lower_inclusive: return "lower_inclusive";
    }
    return "?";
  }

  void validate() const {
    if (d < 1) throw ShapeError("interpolation spec needs d >= 1");
    if (conditions.empty()) throw ShapeError("interpolation spec has no conditions");
    auto check_point = [&](const Point& w, const std::string& where) {
      if (w.size() != d) throw ShapeError(where + ": point has " + std::to_string(w.size()) + " coordinates");
      if (!(w.norm() < 1.0)) throw OutsideBall(where + ": point " + point_str(w) + " is not inside the unit ball");
    };
    if (variant != Variant::points) check_point(omega, "omega");
    std::set<MultiIndex> seen;
    for (std::size_t i = 0; i < conditions.size(); ++i) {
      const auto& c = conditions[i];
      const std::string where = "condition " + std::to_string(i);
      if (c.x.rows() != 1 || c.x.cols() != r() || r() == 0) throw ShapeError(where + ": functional must be 1 x r");
      if (variant == Variant::points) check_point(c.omega, where);
      if (variant == Variant::lower_inclusive) {
        if (c.index.dims() != d) throw ShapeError(where + ": index has wrong dimension");
        if (!seen.insert(c.index).second) throw ShapeError(where + ": repeated index " + c.index.str());
      }
    }
    if (variant == Variant::lower_inclusive) {
      for (const MultiIndex& n : seen) {
        for (int j = 0; j < d; ++j) {
          if (n[j] > 0 && !seen.count(n.minus_unit(j))) {
            throw ShapeError("index set is not lower inclusive: " + n.str() + " present, " +
                             n.minus_unit(j).str() + " missing");
          }
        }
      }
    }
  }
};

/// State space C^n with C^* = col(x_i) and A_j^* as in the interpolation
/// variant: diagonal points, a Jordan-type chain, or shifts on a
/// lower-inclusive index set ([A_j^*]_{n + e_j, n} = 1, diagonal omega_j).
inline OutputPair build_pair(const InterpolationSpec& spec) {
  spec.validate();
  const Eigen::Index n = static_cast<Eigen::Index>(spec.conditions.size());
  const Eigen::Index r = spec.r();
  Mat cstar(n, r);
  for (Eigen::Index i = 0; i < n; ++i) cstar.row(i) = spec.conditions[static_cast<std::size_t>(i)].x;
  std::vector<Mat> astar(static_cast<std::size_t>(spec.d), Mat::Zero(n, n));
  for (int j = 0; j < spec.d; ++j) {
    Mat& aj = astar[static_cast<std::size_t>(j)];
    switch (spec.variant) {
      case InterpolationSpec::Variant::points:
        for (Eigen::Index i = 0; i < n; ++i) aj(i, i) = spec.conditions[static_cast<std::size_t>(i)].omega(j);
        break;
      case InterpolationSpec::Variant::jet_chain:
        for (Eigen::Index i = 0; i < n; ++i) {
          aj(i, i) = spec.omega(j);
          if (i + 1 < n) aj(i + 1, i) = 1.0;
        }
        break;
      case InterpolationSpec::Variant::lower_inclusive:
        for (Eigen::Index i = 0; i < n; ++i) {
          aj(i, i) = spec.omega(j);
          const MultiIndex up = spec.conditions[static_cast<std::size_t>(i)].index.plus_unit(j);
          for (Eigen::Index k = 0; k < n; ++k) {
            if (spec.conditions[static_cast<std::size_t>(k)].index == up) aj(k, i) = 1.0;
          }
        }
        break;
    }
  }
  std::vector<Mat> a;
  for (const Mat& m : astar) a.push_back(m.adjoint());
  OutputPair pair(cstar.adjoint(), std::move(a));
  if (pair.max_commutator() > 1e-12) throw ModelInconsistency("interpolation tuple does not commute");
  return pair;
}

/// [B; D] = M^{1/2} J for M = I - [A; C][A; C]^*, J the canonical basis of
/// the eigenspace of M above tol * max(1, ||M||). The result is coisometric.
inline Colligation cholesky_complete(const OutputPair& pair, double tol = kDefaultTol) {
  const Mat col = pair.stacked();
  const Mat m = Mat::Identity(col.rows(), col.rows()) - col * col.adjoint();
  const double lo = hermitian_min_eig(hermitian_part(m));
  if (lo < -tol) {
    throw NotContractive("I - [A;C][A;C]^* has eigenvalue " + std::to_string(lo) + "; pair is not contractive");
  }
  const Mat l = psd_range_factor(m, tol * std::max(1.0, norm2(m)));
  Mat u(col.rows(), col.cols() + l.cols());
  u << col, l;
  return Colligation::from_matrix(pair.d, pair.p(), u);
}

struct InnerVerdict {
  bool inner = false;
  bool commutative = false;
  bool stable = false;
  bool stability_inconclusive = false;
  bool isometric_pair = false;
  bool weakly_coisometric = false;
  double commutator = 0.0;
  double isometric_residual = 0.0;
  double weak_defect = 0.0;
  int stability_horizon = 0;
  bool polynomial = false;           // A nilpotent, S a polynomial
  bool partial_isometry_checked = false;
  double partial_isometry_defect = 0.0;
  std::string reason;
};

inline InnerVerdict inner_certify(const Colligation& col, double tol = kDefaultTol, int horizon = 2000) {
  InnerVerdict v;
  const OutputPair pair = col.pair();
  v.commutator = pair.max_commutator();
  v.commutative = v.commutator <= tol;
  const StabilityReport st = strong_stability(pair.A, tol, horizon);
  v.stable = st.stable;
  v.stability_inconclusive = st.inconclusive;
  v.stability_horizon = st.horizon;
  v.isometric_residual = pair.isometric_residual();
  v.isometric_pair = v.isometric_residual <= tol;
  const DSubspace ds = d_subspace(pair, std::max(4, 4 * static_cast<int>(col.p()) + 8), tol);
  const WeakCoisometryReport wc = weakly_coisometric_check(col, ds, tol);
  v.weak_defect = wc.defect;
  v.weakly_coisometric = wc.pass;
  v.inner = v.commutative && v.stable && v.isometric_pair && v.weakly_coisometric;
  std::vector<std::string> why;
  if (!v.commutative) why.emplace_back("state tuple does not commute");
  if (!v.stable) why.emplace_back(st.inconclusive ? "stability horizon exhausted" : "state tuple not strongly stable");
  if (!v.isometric_pair) why.emplace_back("output pair not isometric");
  if (!v.weakly_coisometric) why.emplace_back("not weakly coisometric");
  for (std::size_t i = 0; i < why.size(); ++i) v.reason += (i ? "; " : "") + why[i];

  // Nilpotent tuples give polynomial S, which admits the direct test.
  const Eigen::Index p = col.p();
  if (p > 0 && p <= 24 && st.stable && norm2(cp_power(pair.A, static_cast<int>(p))) <= 1e-13) {
    v.polynomial = true;
    const TruncatedSeries s = taylor(col, static_cast<int>(p) + 1);
    const PartialIsometryReport pi = partial_isometry_test(s, 3, std::max(tol, 1e-9));
    v.partial_isometry_checked = true;
    v.partial_isometry_defect = pi.defect;
  }
  return v;
}

struct PipelineResult {
  OutputPair pair;        // from the interpolation data
  OutputPair used_pair;   // after renormalization
  bool renormalized = false;
  Colligation col;
  InnerVerdict inner;
  StructureReport structure;
  double membership_residual = 0.0;
  int membership_cap = 0;
};

/// Interpolation data -> pair -> (renormalize) -> Cholesky completion, with
/// the certificate that S l^m u is annihilated by the original pair.
inline PipelineResult representer_pipeline(const InterpolationSpec& spec, double tol = kDefaultTol,
                                           bool auto_renormalize = true, int check_cap = 3,
                                           int series_cap = 40) {
  PipelineResult res;
  res.pair = build_pair(spec);
  if (!strong_stability(res.pair.A, tol).stable) {
    throw PreconditionError("interpolation tuple is not strongly stable");
  }
  res.used_pair = res.pair;
  if (res.pair.isometric_residual() > 1e-9) {
    if (!auto_renormalize) throw PreconditionError("pair is not isometric and renormalization is disabled");
    res.used_pair = renormalize_exactly_observable(res.pair, tol);
    res.renormalized = true;
  }
  res.col = cholesky_complete(res.used_pair, tol);
  res.inner = inner_certify(res.col, tol);
  res.structure = structure_report(res.col, tol);

  const int d = spec.d;
  const TruncatedSeries s = taylor(res.col, series_cap);
  res.membership_cap = check_cap;
  for (const MultiIndex& m : indices_up_to(d, check_cap)) {
    for (Eigen::Index u = 0; u < res.col.q(); ++u) {
      TruncatedSeries f(d, series_cap, s.rows(), 1);
      const TruncatedSeries col_u = s.column(u);
      for (const auto& [n, c] : col_u.terms()) {
        if (n.total() + m.total() <= series_cap) f.set(n + m, c);
      }
      res.membership_residual = std::max(res.membership_residual, annihilator_residual(res.pair, f).norm());
    }
  }
  return res;
}

/// U = [a^*, (I - a^*a)^{1/2}; (1 - a a^*)^{1/2}, -a] for a row a in the ball.
inline Colligation blaschke(const Point& a) {
  const int d = static_cast<int>(a.size());
  if (d < 1) throw ShapeError("blaschke: empty point");
  if (!(a.norm() < 1.0)) throw OutsideBall("blaschke: point " + point_str(a) + " is not inside the unit ball");
  const Mat arow = a.transpose();  // 1 x d
  const Mat root = psd_sqrt(Mat::Identity(d, d) - arow.adjoint() * arow);
  std::vector<Mat> as, bs;
  for (int j = 0; j < d; ++j) {
    as.push_back(Mat::Constant(1, 1, std::conj(a(j))));
    bs.push_back(root.row(j));
  }
  return Colligation(std::move(as), std::move(bs), Mat::Constant(1, 1, std::sqrt(1.0 - a.squaredNorm())), -arow);
}

struct HankelRow {
  int n = 0;
  int rank = 0;
  boost::multiprecision::cpp_rational det;
  bool full_rank() const { return rank == n + 1; }
};

inline constexpr int kHankelMaxN = 64;

/// Exact ranks and determinants of H_n = [s_{i+j}]_{i,j=0..n}, s_k = (k+1)/(2k+1),
/// by fraction-free (Bareiss) elimination after clearing row denominators.
inline std::vector<HankelRow> hankel_probe(int n_max) {
  using boost::multiprecision::cpp_int;
  using boost::multiprecision::cpp_rational;
  if (n_max < 0 || n_max > kHankelMaxN) {
    throw PreconditionError("hankel_probe: n must lie in [0, " + std::to_string(kHankelMaxN) + "]");
  }
  std::vector<HankelRow> out;
  for (int n = 0; n <= n_max; ++n) {
    const int sz = n + 1;
    std::vector<std::vector<cpp_int>> m(static_cast<std::size_t>(sz), std::vector<cpp_int>(static_cast<std::size_t>(sz)));
    cpp_rational scale = 1;  // det(H) = det(M) * scale
    for (int i = 0; i < sz; ++i) {
      cpp_int l = 1;
      for (int j = 0; j < sz; ++j) l = boost::multiprecision::lcm(l, cpp_int(2 * (i + j) + 1));
      for (int j = 0; j < sz; ++j) {
        const int k = i + j;
        m[i][j] = cpp_int(k + 1) * (l / (2 * k + 1));
      }
      scale /= cpp_rational(l);
    }
    // Bareiss with row pivoting; rank = number of pivots.
    int rank = 0;
    int sign = 1;
    cpp_int prev = 1;
    int row = 0;
    for (int col = 0; col < sz && row < sz; ++col) {
      int piv = -1;
      for (int i = row; i < sz; ++i) {
        if (m[i][col] != 0) {
          piv = i;
          break;
        }
      }
      if (piv < 0) continue;
      if (piv != row) {
        std::swap(m[piv], m[row]);
        sign = -sign;
      }
      for (int i = row + 1; i < sz; ++i) {
        for (int j = col + 1; j < sz; ++j) {
          m[i][j] = (m[row][col] * m[i][j] - m[i][col] * m[row][j]) / prev;
        }
        m[i][col] = 0;
      }
      prev = m[row][col];
      ++row;
      ++rank;
    }
    HankelRow hr;
    hr.n = n;
    hr.rank = rank;
    hr.det = rank == sz ? cpp_rational(sign * m[sz - 1][sz - 1]) * scale : cpp_rational(0);
    out.push_back(hr);
  }
  return out;
}

}  // namespace arveson
