#pragma once

// Multi-indices, the weighted inner product of H(k_d), and truncated
// matrix-valued power series in d commuting variables.

#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "arveson/linalg.hpp"

namespace arveson {

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries) : n_(std::move(entries)) {
    for (int v : n_) {
      if (v < 0) throw ShapeError("multi-index entries must be nonnegative");
    }
  }
  MultiIndex(std::initializer_list<int> entries)
      : MultiIndex(std::vector<int>(entries)) {}

  static MultiIndex zero(int d) { return MultiIndex(std::vector<int>(d, 0)); }
  static MultiIndex unit(int d, int j) {
    std::vector<int> v(d, 0);
    v.at(j) = 1;
    return MultiIndex(std::move(v));
  }

  int dims() const { return static_cast<int>(n_.size()); }
  int operator[](int j) const { return n_.at(j); }
  const std::vector<int>& entries() const { return n_; }
  int total() const { return std::accumulate(n_.begin(), n_.end(), 0); }

  MultiIndex plus_unit(int j) const {
    std::vector<int> v = n_;
    ++v.at(j);
    return MultiIndex(std::move(v));
  }
  /// n - e_j; caller guarantees n_j >= 1.
  MultiIndex minus_unit(int j) const {
    std::vector<int> v = n_;
    if (v.at(j) == 0) throw ShapeError("minus_unit below zero");
    --v[j];
    return MultiIndex(std::move(v));
  }
  MultiIndex operator+(const MultiIndex& o) const {
    check_same(o);
    std::vector<int> v = n_;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.n_[i];
    return MultiIndex(std::move(v));
  }
  /// Componentwise this >= o.
  bool dominates(const MultiIndex& o) const {
    check_same(o);
    for (std::size_t i = 0; i < n_.size(); ++i) {
      if (n_[i] < o.n_[i]) return false;
    }
    return true;
  }
  MultiIndex operator-(const MultiIndex& o) const {
    if (!dominates(o)) throw ShapeError("multi-index difference below zero");
    std::vector<int> v = n_;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= o.n_[i];
    return MultiIndex(std::move(v));
  }

  bool operator==(const MultiIndex& o) const { return n_ == o.n_; }
  bool operator!=(const MultiIndex& o) const { return n_ != o.n_; }

  // Graded order: lower total degree first; within a degree the
  // lexicographically larger index first, so 1, l1, l2, l1^2, l1 l2, l2^2.
  bool operator<(const MultiIndex& o) const {
    const int a = total();
    const int b = o.total();
    if (a != b) return a < b;
    return n_ > o.n_;
  }

  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < n_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(n_[i]);
    }
    return s + ")";
  }

 private:
  void check_same(const MultiIndex& o) const {
    if (o.n_.size() != n_.size()) throw ShapeError("multi-index dimension mismatch");
  }
  std::vector<int> n_;
};

namespace detail {

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b,
                                 const MultiIndex& n) {
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw DegreeTooLarge("weight of " + n.str() + " overflows 64 bits");
  }
  return r;
}

// C(a, b) exactly, with overflow detection.
inline std::uint64_t binomial(std::uint64_t a, std::uint64_t b,
                              const MultiIndex& n) {
  if (b > a - b) b = a - b;
  unsigned __int128 c = 1;
  for (std::uint64_t t = 1; t <= b; ++t) {
    c = c * (a - b + t) / t;
    if (c > std::numeric_limits<std::uint64_t>::max()) {
      throw DegreeTooLarge("weight of " + n.str() + " overflows 64 bits");
    }
  }
  return static_cast<std::uint64_t>(c);
}

}  // namespace detail

/// Multinomial |n|! / n!.
inline std::uint64_t weight(const MultiIndex& n) {
  std::uint64_t w = 1;
  std::uint64_t partial = 0;
  for (int v : n.entries()) {
    partial += static_cast<std::uint64_t>(v);
    w = detail::checked_mul(w, detail::binomial(partial, v, n), n);
  }
  return w;
}

/// All multi-indices of total degree k, in the graded order above.
inline std::vector<MultiIndex> indices_of_degree(int d, int k) {
  std::vector<MultiIndex> out;
  std::vector<int> cur(d, 0);
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == d - 1) {
      cur[pos] = remaining;
      out.emplace_back(cur);
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      cur[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  if (d == 0) {
    if (k == 0) out.emplace_back(std::vector<int>{});
    return out;
  }
  rec(rec, 0, k);
  return out;
}

inline std::vector<MultiIndex> indices_up_to(int d, int cap) {
  std::vector<MultiIndex> out;
  for (int k = 0; k <= cap; ++k) {
    auto layer = indices_of_degree(d, k);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

/// Matrix-valued polynomial sum_n c_n lambda^n, every |n| <= cap, all
/// coefficients rows x cols. Absent indices are zero.
class TruncatedSeries {
 public:
  TruncatedSeries(int d, int cap, Eigen::Index rows, Eigen::Index cols)
      : d_(d), cap_(cap), rows_(rows), cols_(cols) {
    if (d < 1) throw ShapeError("series needs d >= 1");
    if (cap < 0) throw ShapeError("degree cap must be nonnegative");
  }

  static TruncatedSeries constant(int d, int cap, const Mat& c) {
    TruncatedSeries s(d, cap, c.rows(), c.cols());
    s.set(MultiIndex::zero(d), c);
    return s;
  }
  static TruncatedSeries monomial(int d, int cap, const MultiIndex& n,
                                  const Mat& c) {
    TruncatedSeries s(d, cap, c.rows(), c.cols());
    s.set(n, c);
    return s;
  }
  /// Scalar polynomial lambda_j.
  static TruncatedSeries variable(int d, int cap, int j) {
    return monomial(d, cap, MultiIndex::unit(d, j), Mat::Ones(1, 1));
  }

  int dims() const { return d_; }
  int cap() const { return cap_; }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  const std::map<MultiIndex, Mat>& terms() const { return c_; }

  Mat coeff(const MultiIndex& n) const {
    auto it = c_.find(n);
    if (it == c_.end()) return Mat::Zero(rows_, cols_);
    return it->second;
  }

  void set(const MultiIndex& n, const Mat& c) {
    check_index(n);
    if (c.rows() != rows_ || c.cols() != cols_) {
      throw ShapeError("coefficient shape " + shape_str(c) + " != " +
                       std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    c_[n] = c;
  }
  void add(const MultiIndex& n, const Mat& c) {
    auto it = c_.find(n);
    if (it == c_.end()) {
      set(n, c);
    } else {
      if (c.rows() != rows_ || c.cols() != cols_) throw ShapeError("coefficient shape");
      it->second += c;
    }
  }

  /// Highest total degree with a nonzero coefficient; -1 for the zero series.
  int degree(double eps = 0.0) const {
    int deg = -1;
    for (const auto& [n, c] : c_) {
      if (c.size() && c.cwiseAbs().maxCoeff() > eps) deg = std::max(deg, n.total());
    }
    return deg;
  }

  Mat evaluate(const Point& lambda) const {
    if (lambda.size() != d_) throw ShapeError("point dimension mismatch");
    Mat out = Mat::Zero(rows_, cols_);
    for (const auto& [n, c] : c_) {
      Scalar mono(1.0, 0.0);
      for (int j = 0; j < d_; ++j) {
        for (int e = 0; e < n[j]; ++e) mono *= lambda(j);
      }
      out += mono * c;
    }
    return out;
  }

  TruncatedSeries truncated(int cap) const {
    TruncatedSeries s(d_, cap, rows_, cols_);
    for (const auto& [n, c] : c_) {
      if (n.total() <= cap) s.c_[n] = c;
    }
    return s;
  }

  TruncatedSeries operator+(const TruncatedSeries& o) const {
    check_compatible(o);
    TruncatedSeries s(d_, std::min(cap_, o.cap_), rows_, cols_);
    for (const auto& [n, c] : c_) {
      if (n.total() <= s.cap_) s.add(n, c);
    }
    for (const auto& [n, c] : o.c_) {
      if (n.total() <= s.cap_) s.add(n, c);
    }
    return s;
  }
  TruncatedSeries operator-(const TruncatedSeries& o) const { return *this + o * Scalar(-1.0); }
  TruncatedSeries operator*(Scalar a) const {
    TruncatedSeries s = *this;
    for (auto& kv : s.c_) kv.second *= a;
    return s;
  }
  /// Constant matrix applied on the left of every coefficient.
  TruncatedSeries left(const Mat& m) const {
    if (m.cols() != rows_) throw ShapeError("left factor " + shape_str(m));
    TruncatedSeries s(d_, cap_, m.rows(), cols_);
    for (const auto& [n, c] : c_) s.c_[n] = m * c;
    return s;
  }
  TruncatedSeries right(const Mat& m) const {
    if (m.rows() != cols_) throw ShapeError("right factor " + shape_str(m));
    TruncatedSeries s(d_, cap_, rows_, m.cols());
    for (const auto& [n, c] : c_) s.c_[n] = c * m;
    return s;
  }
  /// Column k as a vector-valued series.
  TruncatedSeries column(Eigen::Index k) const {
    TruncatedSeries s(d_, cap_, rows_, 1);
    for (const auto& [n, c] : c_) s.c_[n] = c.col(k);
    return s;
  }

  /// Largest absolute coefficient difference.
  double distance(const TruncatedSeries& o) const {
    check_compatible(o);
    double m = 0.0;
    for (const auto& [n, c] : c_) m = std::max(m, (c - o.coeff(n)).cwiseAbs().maxCoeff());
    for (const auto& [n, c] : o.c_) m = std::max(m, (c - coeff(n)).cwiseAbs().maxCoeff());
    return m;
  }

 private:
  void check_index(const MultiIndex& n) const {
    if (n.dims() != d_) throw ShapeError("index " + n.str() + " has wrong dimension");
    if (n.total() > cap_) {
      throw ShapeError("index " + n.str() + " exceeds degree cap " + std::to_string(cap_));
    }
  }
  void check_compatible(const TruncatedSeries& o) const {
    if (o.d_ != d_ || o.rows_ != rows_ || o.cols_ != cols_) {
      throw ShapeError("series shape mismatch");
    }
  }

  int d_;
  int cap_;
  Eigen::Index rows_;
  Eigen::Index cols_;
  std::map<MultiIndex, Mat> c_;
};

/// Vector-valued polynomial in H_Y(k_d).
using ArvesonElement = TruncatedSeries;

/// Convolution product; the result is exact up to min(cap, a.cap, b.cap),
/// which is its declared cap.
inline TruncatedSeries series_mul(const TruncatedSeries& a, const TruncatedSeries& b,
                                  int cap) {
  if (a.dims() != b.dims()) throw ShapeError("series_mul: dimension mismatch");
  if (a.cols() != b.rows()) {
    throw ShapeError("series_mul: inner shapes " + std::to_string(a.cols()) + " vs " +
                     std::to_string(b.rows()));
  }
  const int out_cap = std::min({cap, a.cap(), b.cap()});
  TruncatedSeries out(a.dims(), out_cap, a.rows(), b.cols());
  for (const auto& [m, am] : a.terms()) {
    if (m.total() > out_cap) continue;
    for (const auto& [n, bn] : b.terms()) {
      if (m.total() + n.total() > out_cap) continue;
      out.add(m + n, am * bn);
    }
  }
  return out;
}

/// (I - L)^{-1} = sum_k L^k for a = I - L with L(0) = 0. Cap of the result
/// is min(cap, a.cap).
inline TruncatedSeries neumann_inverse(const TruncatedSeries& a, int cap) {
  if (a.rows() != a.cols()) throw ShapeError("neumann_inverse: non-square series");
  const int d = a.dims();
  const Eigen::Index k = a.rows();
  const Mat id = Mat::Identity(k, k);
  if ((a.coeff(MultiIndex::zero(d)) - id).cwiseAbs().maxCoeff() > 1e-14) {
    throw PreconditionError("neumann_inverse: constant term is not the identity");
  }
  const int out_cap = std::min(cap, a.cap());
  std::vector<std::pair<MultiIndex, Mat>> l;
  for (const auto& [m, am] : a.terms()) {
    if (m.total() == 0 || m.total() > out_cap) continue;
    l.emplace_back(m, -am);
  }
  TruncatedSeries r(d, out_cap, k, k);
  r.set(MultiIndex::zero(d), id);
  for (const MultiIndex& n : indices_up_to(d, out_cap)) {
    if (n.total() == 0) continue;
    Mat acc = Mat::Zero(k, k);
    bool any = false;
    for (const auto& [m, lm] : l) {
      if (!n.dominates(m)) continue;
      auto it = r.terms().find(n - m);
      if (it == r.terms().end()) continue;
      acc += lm * it->second;
      any = true;
    }
    if (any) r.set(n, acc);
  }
  return r;
}

/// M*_{lambda_j}: lambda^m -> (m_j/|m|) lambda^{m-e_j}. The result is exact up
/// to degree f.cap - 1 of the underlying function (clamped at 0).
inline TruncatedSeries backward_shift(const TruncatedSeries& f, int j) {
  if (j < 0 || j >= f.dims()) throw ShapeError("backward_shift: axis out of range");
  TruncatedSeries out(f.dims(), std::max(f.cap() - 1, 0), f.rows(), f.cols());
  for (const auto& [m, c] : f.terms()) {
    if (m[j] == 0) continue;
    out.add(m.minus_unit(j), (static_cast<double>(m[j]) / m.total()) * c);
  }
  return out;
}

/// M_{lambda_j}. The result cap is f.cap + 1.
inline TruncatedSeries shift(const TruncatedSeries& f, int j) {
  if (j < 0 || j >= f.dims()) throw ShapeError("shift: axis out of range");
  TruncatedSeries out(f.dims(), f.cap() + 1, f.rows(), f.cols());
  for (const auto& [m, c] : f.terms()) out.set(m.plus_unit(j), c);
  return out;
}

/// <f, g> = sum_n (n!/|n|!) tr(g_n^* f_n); linear in f.
inline Scalar arveson_inner(const TruncatedSeries& f, const TruncatedSeries& g) {
  if (f.dims() != g.dims() || f.rows() != g.rows() || f.cols() != g.cols()) {
    throw ShapeError("arveson_inner: shape mismatch");
  }
  Scalar s(0.0, 0.0);
  for (const auto& [n, fn] : f.terms()) {
    auto it = g.terms().find(n);
    if (it == g.terms().end()) continue;
    s += (it->second.adjoint() * fn).trace() / static_cast<double>(weight(n));
  }
  return s;
}

inline double arveson_norm(const TruncatedSeries& f) {
  return std::sqrt(std::max(arveson_inner(f, f).real(), 0.0));
}

/// Orthonormal coordinates of a Y-valued polynomial of degree <= cap:
/// entry (n, i) = f_{n,i} / sqrt(w_n), index-major, component-minor.
inline Vec to_coords(const TruncatedSeries& f, int cap) {
  if (f.cols() != 1) throw ShapeError("to_coords: vector-valued series required");
  const auto idx = indices_up_to(f.dims(), cap);
  const Eigen::Index r = f.rows();
  Vec v = Vec::Zero(static_cast<Eigen::Index>(idx.size()) * r);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    auto it = f.terms().find(idx[k]);
    if (it == f.terms().end()) continue;
    v.segment(static_cast<Eigen::Index>(k) * r, r) =
        it->second.col(0) / std::sqrt(static_cast<double>(weight(idx[k])));
  }
  return v;
}

inline TruncatedSeries from_coords(const Vec& v, int d, int cap, Eigen::Index r) {
  const auto idx = indices_up_to(d, cap);
  if (v.size() != static_cast<Eigen::Index>(idx.size()) * r) {
    throw ShapeError("from_coords: length mismatch");
  }
  TruncatedSeries f(d, cap, r, 1);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    Vec seg = v.segment(static_cast<Eigen::Index>(k) * r, r);
    if (seg.cwiseAbs().maxCoeff() == 0.0) continue;
    f.set(idx[k], seg * std::sqrt(static_cast<double>(weight(idx[k]))));
  }
  return f;
}

/// Position of n in indices_up_to(d, cap).
inline Eigen::Index index_position(const MultiIndex& n) {
  const int d = n.dims();
  const int k = n.total();
  Eigen::Index pos = 0;
  for (int t = 0; t < k; ++t) pos += static_cast<Eigen::Index>(indices_of_degree(d, t).size());
  const auto layer = indices_of_degree(d, k);
  for (std::size_t i = 0; i < layer.size(); ++i) {
    if (layer[i] == n) return pos + static_cast<Eigen::Index>(i);
  }
  return -1;
}

}  // namespace arveson
