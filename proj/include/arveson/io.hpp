#pragma once

// JSON encoding of engine values. Complex entries are [re, im] pairs and
// matrices are row-major lists of rows; dimensions are always explicit so
// empty blocks survive a round trip. Requires nlohmann/json.

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "arveson/beurling.hpp"
#include "arveson/charfun.hpp"
#include "arveson/colligation.hpp"
#include "arveson/mindex.hpp"

namespace arveson::io {

using Json = nlohmann::ordered_json;

/// Malformed or inconsistent input; the message carries a JSON path.
class InputError : public Error {
 public:
  InputError(const std::string& path, const std::string& what) : Error(path + ": " + what) {}
};

inline Json encode_scalar(Scalar z) { return Json::array({z.real(), z.imag()}); }

inline Scalar decode_scalar(const Json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw InputError(path, "expected a complex number [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Json encode_matrix(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(encode_scalar(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Mat decode_matrix(const Json& j, Eigen::Index rows, Eigen::Index cols, const std::string& path) {
  if (!j.is_array()) throw InputError(path, "expected a matrix (list of rows)");
  if (rows == 0) {
    if (!j.empty()) throw InputError(path, "expected 0 rows, got " + std::to_string(j.size()));
    return Mat(0, cols);
  }
  if (static_cast<Eigen::Index>(j.size()) != rows) {
    throw InputError(path, "expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
  }
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InputError(rp, "expected a row of " + std::to_string(cols) + " entries");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      m(i, k) = decode_scalar(row[static_cast<std::size_t>(k)], rp + "[" + std::to_string(k) + "]");
    }
  }
  return m;
}

inline Json encode_point(const Point& p) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) a.push_back(encode_scalar(p(i)));
  return a;
}

inline Point decode_point(const Json& j, int d, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != d) {
    throw InputError(path, "expected a point with " + std::to_string(d) + " coordinates");
  }
  Point p(d);
  for (int i = 0; i < d; ++i) p(i) = decode_scalar(j[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
  return p;
}

namespace detail {

inline const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw InputError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(path, std::string("missing field \"") + key + "\"");
  return *it;
}

inline long long int_field(const Json& j, const char* key, const std::string& path, long long lo = 0) {
  const Json& v = field(j, key, path);
  if (!v.is_number_integer()) throw InputError(path + "." + key, "expected an integer");
  const long long x = v.get<long long>();
  if (x < lo) throw InputError(path + "." + key, "must be >= " + std::to_string(lo));
  return x;
}

inline std::vector<Mat> blocks(const Json& j, const char* key, int d, Eigen::Index rows, Eigen::Index cols,
                               const std::string& path) {
  const Json& arr = field(j, key, path);
  const std::string bp = path + "." + key;
  if (!arr.is_array() || static_cast<int>(arr.size()) != d) {
    throw InputError(bp, "expected " + std::to_string(d) + " blocks");
  }
  std::vector<Mat> out;
  for (int i = 0; i < d; ++i) {
    out.push_back(decode_matrix(arr[static_cast<std::size_t>(i)], rows, cols, bp + "[" + std::to_string(i) + "]"));
  }
  return out;
}

inline Json encode_blocks(const std::vector<Mat>& ms) {
  Json a = Json::array();
  for (const Mat& m : ms) a.push_back(encode_matrix(m));
  return a;
}

}  // namespace detail

inline Json to_json(const Colligation& c) {
  Json j;
  j["d"] = c.d;
  j["dim_state"] = c.p();
  j["dim_input"] = c.q();
  j["dim_output"] = c.r();
  j["A"] = detail::encode_blocks(c.A);
  j["B"] = detail::encode_blocks(c.B);
  j["C"] = encode_matrix(c.C);
  j["D"] = encode_matrix(c.D);
  return j;
}

inline Colligation colligation_from_json(const Json& j, const std::string& path = "$") {
  const int d = static_cast<int>(detail::int_field(j, "d", path, 1));
  const Eigen::Index p = detail::int_field(j, "dim_state", path);
  const Eigen::Index q = detail::int_field(j, "dim_input", path);
  const Eigen::Index r = detail::int_field(j, "dim_output", path);
  auto a = detail::blocks(j, "A", d, p, p, path);
  auto b = detail::blocks(j, "B", d, p, q, path);
  Mat c = decode_matrix(detail::field(j, "C", path), r, p, path + ".C");
  Mat dd = decode_matrix(detail::field(j, "D", path), r, q, path + ".D");
  return Colligation(std::move(a), std::move(b), std::move(c), std::move(dd));
}

inline Json to_json(const OutputPair& pr) {
  Json j;
  j["d"] = pr.d;
  j["dim_state"] = pr.p();
  j["dim_output"] = pr.r();
  j["A"] = detail::encode_blocks(pr.A);
  j["C"] = encode_matrix(pr.C);
  return j;
}

inline OutputPair pair_from_json(const Json& j, const std::string& path = "$") {
  const int d = static_cast<int>(detail::int_field(j, "d", path, 1));
  const Eigen::Index p = detail::int_field(j, "dim_state", path);
  const Eigen::Index r = detail::int_field(j, "dim_output", path);
  auto a = detail::blocks(j, "A", d, p, p, path);
  Mat c = decode_matrix(detail::field(j, "C", path), r, p, path + ".C");
  return OutputPair(std::move(c), std::move(a));
}

inline Json to_json(const RowContraction& t) {
  Json j;
  j["d"] = t.d;
  j["dim"] = t.p();
  j["T"] = detail::encode_blocks(t.T);
  return j;
}

inline RowContraction row_contraction_from_json(const Json& j, const std::string& path = "$") {
  const int d = static_cast<int>(detail::int_field(j, "d", path, 1));
  const Eigen::Index p = detail::int_field(j, "dim", path, 1);
  return RowContraction(detail::blocks(j, "T", d, p, p, path));
}

inline Json multi_index_json(const MultiIndex& n) { return Json(n.entries()); }

inline MultiIndex multi_index_from_json(const Json& j, int d, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != d) {
    throw InputError(path, "expected a multi-index with " + std::to_string(d) + " entries");
  }
  std::vector<int> v;
  for (const Json& e : j) {
    if (!e.is_number_integer() || e.get<long long>() < 0) throw InputError(path, "multi-index entries must be nonnegative integers");
    v.push_back(e.get<int>());
  }
  return MultiIndex(std::move(v));
}

/// {"d", "rows", "cols", "cap", "coefficients": [{"index": [...], "value": matrix}]}
inline Json to_json(const TruncatedSeries& s) {
  Json j;
  j["d"] = s.dims();
  j["rows"] = s.rows();
  j["cols"] = s.cols();
  j["cap"] = s.cap();
  Json cs = Json::array();
  for (const auto& [n, c] : s.terms()) {
    Json e;
    e["index"] = multi_index_json(n);
    e["value"] = encode_matrix(c);
    cs.push_back(std::move(e));
  }
  j["coefficients"] = std::move(cs);
  return j;
}

inline TruncatedSeries series_from_json(const Json& j, const std::string& path = "$") {
  const int d = static_cast<int>(detail::int_field(j, "d", path, 1));
  const Eigen::Index rows = detail::int_field(j, "rows", path, 1);
  const Eigen::Index cols = detail::int_field(j, "cols", path, 1);
  const Json& cs = detail::field(j, "coefficients", path);
  if (!cs.is_array()) throw InputError(path + ".coefficients", "expected a list");
  std::vector<std::pair<MultiIndex, Mat>> terms;
  int deg = 0;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const std::string ep = path + ".coefficients[" + std::to_string(i) + "]";
    MultiIndex n = multi_index_from_json(detail::field(cs[i], "index", ep), d, ep + ".index");
    deg = std::max(deg, n.total());
    terms.emplace_back(n, decode_matrix(detail::field(cs[i], "value", ep), rows, cols, ep + ".value"));
  }
  const int cap = j.contains("cap") ? static_cast<int>(detail::int_field(j, "cap", path)) : deg;
  if (cap < deg) throw InputError(path + ".cap", "smaller than the degree of a listed coefficient");
  TruncatedSeries s(d, cap, rows, cols);
  for (const auto& [n, c] : terms) {
    if (s.terms().count(n)) throw InputError(path, "repeated index " + n.str());
    s.set(n, c);
  }
  return s;
}

inline InterpolationSpec::Variant variant_from_string(const std::string& v, const std::string& path) {
  if (v == "points") return InterpolationSpec::Variant::points;
  if (v == "jet_chain") return InterpolationSpec::Variant::jet_chain;
  if (v == "lower_inclusive") return InterpolationSpec::Variant::lower_inclusive;
  throw InputError(path, "unknown variant \"" + v + "\" (points | jet_chain | lower_inclusive)");
}

inline Json to_json(const InterpolationSpec& s) {
  Json j;
  j["variant"] = InterpolationSpec::variant_name(s.variant);
  j["d"] = s.d;
  if (s.variant != InterpolationSpec::Variant::points) j["omega"] = encode_point(s.omega);
  Json cs = Json::array();
  for (const auto& c : s.conditions) {
    Json e;
    if (s.variant == InterpolationSpec::Variant::points) e["omega"] = encode_point(c.omega);
    if (s.variant == InterpolationSpec::Variant::lower_inclusive) e["index"] = multi_index_json(c.index);
    e["x"] = encode_point(c.x.row(0).transpose());
    cs.push_back(std::move(e));
  }
  j["conditions"] = std::move(cs);
  return j;
}

inline InterpolationSpec spec_from_json(const Json& j, const std::string& path = "$") {
  InterpolationSpec s;
  const Json& v = detail::field(j, "variant", path);
  if (!v.is_string()) throw InputError(path + ".variant", "expected a string");
  s.variant = variant_from_string(v.get<std::string>(), path + ".variant");
  s.d = static_cast<int>(detail::int_field(j, "d", path, 1));
  if (s.variant != InterpolationSpec::Variant::points) s.omega = decode_point(detail::field(j, "omega", path), s.d, path + ".omega");
  const Json& cs = detail::field(j, "conditions", path);
  if (!cs.is_array() || cs.empty()) throw InputError(path + ".conditions", "expected a nonempty list");
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const std::string cp = path + ".conditions[" + std::to_string(i) + "]";
    InterpolationCondition c;
    const Json& x = detail::field(cs[i], "x", cp);
    if (!x.is_array() || x.empty()) throw InputError(cp + ".x", "expected a nonempty list of complex entries");
    c.x = decode_point(x, static_cast<int>(x.size()), cp + ".x").transpose();
    if (s.variant == InterpolationSpec::Variant::points) c.omega = decode_point(detail::field(cs[i], "omega", cp), s.d, cp + ".omega");
    if (s.variant == InterpolationSpec::Variant::lower_inclusive) {
      c.index = multi_index_from_json(detail::field(cs[i], "index", cp), s.d, cp + ".index");
    }
    s.conditions.push_back(std::move(c));
  }
  return s;
}

inline Json parse(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(source, std::string("JSON parse error: ") + e.what());
  }
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace arveson::io
