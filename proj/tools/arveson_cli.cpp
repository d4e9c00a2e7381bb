// Batch front end: JSON in, certificate report out.
//
// Exit codes: 0 every required check passed, 1 a required check failed or the
// engine rejected the input on mathematical grounds, 2 unreadable or
// inconsistent input, 3 a required check was inconclusive.

#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "arveson/arveson.hpp"
#include "arveson/io.hpp"

namespace {

using namespace arveson;
using io::Json;

constexpr const char* kSchema = "arveson-report/1";
constexpr int kExitPass = 0, kExitFail = 1, kExitInput = 2, kExitInconclusive = 3;

struct Options {
  double tol = kDefaultTol;
  int grid_n = 12;
  double grid_radius = 0.7;
  std::uint64_t seed = kDefaultSeed;
  int horizon = 2000;
  int cap = 30;
  std::string format = "json";
  std::string out;
  std::string artifact;
  std::string require;
  bool require_set = false;
};

enum class Verdict { pass, fail, inconclusive };

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct Check {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  Verdict verdict = Verdict::fail;
  bool required = false;
  std::string note;
};

Check below(std::string name, double residual, double threshold) {
  return {std::move(name), residual, threshold, residual <= threshold ? Verdict::pass : Verdict::fail, false, ""};
}

class Report {
 public:
  Report(std::string command, const Options& opt) : command_(std::move(command)), opt_(opt) {}

  void input(const std::string& path, const std::string& bytes) {
    input_ = Json::object();
    input_["file"] = std::filesystem::path(path).filename().string();
    input_["sha256"] = sha256_hex(bytes);
  }
  void add(Check c) { checks_.push_back(std::move(c)); }
  Json& artifacts() { return artifacts_; }
  void error(std::string what) { error_ = std::move(what); }

  // Marks the required checks; an explicit --require list replaces the defaults.
  void require(const std::set<std::string>& defaults) {
    std::set<std::string> names = defaults;
    if (opt_.require_set) {
      names.clear();
      std::stringstream ss(opt_.require);
      for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) names.insert(item);
      }
    }
    for (Check& c : checks_) c.required = names.count(c.name) > 0 || names.count("all") > 0;
  }

  int exit_code() const {
    if (!error_.empty()) return kExitFail;
    bool inconclusive = false;
    for (const Check& c : checks_) {
      if (!c.required) continue;
      if (c.verdict == Verdict::fail) return kExitFail;
      if (c.verdict == Verdict::inconclusive) inconclusive = true;
    }
    return inconclusive ? kExitInconclusive : kExitPass;
  }

  Json to_json() const {
    Json j;
    j["schema"] = kSchema;
    j["command"] = command_;
    Json o;
    o["tol"] = opt_.tol;
    o["grid_n"] = opt_.grid_n;
    o["grid_radius"] = opt_.grid_radius;
    o["seed"] = opt_.seed;
    o["stability_horizon"] = opt_.horizon;
    o["cap"] = opt_.cap;
    j["options"] = o;
    j["input"] = input_;
    Json cs = Json::array();
    for (const Check& c : checks_) {
      Json e;
      e["name"] = c.name;
      e["residual"] = c.residual;
      e["threshold"] = c.threshold;
      e["verdict"] = verdict_name(c.verdict);
      e["required"] = c.required;
      if (!c.note.empty()) e["note"] = c.note;
      cs.push_back(std::move(e));
    }
    j["checks"] = std::move(cs);
    if (!error_.empty()) j["error"] = error_;
    const int code = exit_code();
    j["status"] = code == kExitPass ? "pass" : code == kExitInconclusive ? "inconclusive" : "fail";
    j["exit_code"] = code;
    if (!artifacts_.empty()) j["artifacts"] = artifacts_;
    return j;
  }

  std::string to_text() const {
    std::ostringstream os;
    os << "arveson " << command_ << " (" << kSchema << ")\n";
    if (!input_.is_null()) {
      os << "input  " << input_["file"].get<std::string>() << "  sha256 " << input_["sha256"].get<std::string>() << "\n";
    }
    char line[256];
    for (const Check& c : checks_) {
      std::snprintf(line, sizeof line, "  %-24s residual %10.3e  threshold %9.2e  %-12s%s", c.name.c_str(), c.residual,
                    c.threshold, verdict_name(c.verdict), c.required ? " [required]" : "");
      os << line;
      if (!c.note.empty()) os << "  (" << c.note << ")";
      os << "\n";
    }
    if (!error_.empty()) os << "error: " << error_ << "\n";
    const int code = exit_code();
    os << "status: " << (code == kExitPass ? "pass" : code == kExitInconclusive ? "inconclusive" : "fail") << "\n";
    return os.str();
  }

 private:
  static std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("sha256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned int i = 0; i < len; ++i) {
      s += hex[md[i] >> 4];
      s += hex[md[i] & 15];
    }
    return s;
  }

  std::string command_;
  Options opt_;
  Json input_;
  std::vector<Check> checks_;
  Json artifacts_ = Json::object();
  std::string error_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io::InputError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io::InputError(path, "cannot write file");
  out << text;
}

// ---- commands -------------------------------------------------------------

void run_check(const Json& j, const Options& opt, Report& rep) {
  const Colligation col = io::colligation_from_json(j);
  const StructureReport sr = structure_report(col, opt.tol);
  rep.add(below("contractive", std::max(0.0, sr.sigma_max - 1.0), opt.tol));
  rep.add(below("isometric", sr.isometry_residual, opt.tol));
  rep.add(below("coisometric", sr.coisometry_residual, opt.tol));
  rep.add(below("unitary", std::max(sr.isometry_residual, sr.coisometry_residual), opt.tol));
  rep.add(below("commutative", sr.commutator, opt.tol));

  const StabilityReport st = strong_stability(col.A, opt.tol, opt.horizon);
  Check stable = below("strongly_stable", st.decay.empty() ? 0.0 : st.decay.back(), opt.tol);
  if (st.inconclusive) {
    stable.verdict = Verdict::inconclusive;
    stable.note = "horizon " + std::to_string(opt.horizon) + " exhausted while still decaying";
  }
  rep.add(stable);

  const DSubspace ds = d_subspace(col.pair(), opt.cap, opt.tol, opt.seed);
  const WeakCoisometryReport wc = weakly_coisometric_check(col, ds, opt.tol);
  Check weak = below("weakly_coisometric", wc.defect, opt.tol);
  if (ds.inconclusive) {
    weak.verdict = Verdict::inconclusive;
    weak.note = "observability tail not negligible at cap " + std::to_string(opt.cap);
  }
  rep.add(weak);

  if (sr.contractive) {
    Rng rng(opt.seed);
    const auto pts = random_ball_points(rng, opt.grid_n, col.d, opt.grid_radius);
    const Evaluator s = evaluator_of(col);
    const OutputPair pr = col.pair();
    double gap = 0.0, identity = 0.0;
    for (const Point& l : pts) {
      for (const Point& z : pts) {
        gap = std::max(gap, norm2(kernel_KS(s, l, z) - kernel_KCA(pr, l, z)));
        identity = std::max(identity, defect_decomposition(col, l, z, opt.tol).identity_error);
      }
    }
    rep.add(below("kernel_gap", gap, opt.tol));
    rep.add(below("defect_identity", identity, opt.tol));
    const KernelGrid residual = KernelGrid::build(
        pts, [&](const Point& l, const Point& z) { return defect_decomposition(col, l, z, opt.tol).residual; },
        "residual");
    rep.add(below("defect_residual_psd", std::max(0.0, -kernel_psd_check(residual, opt.tol).min_eig), opt.tol));
  } else {
    for (const char* name : {"kernel_gap", "defect_identity", "defect_residual_psd"}) {
      rep.add({name, 0.0, opt.tol, Verdict::inconclusive, false, "requires a contractive colligation"});
    }
  }

  const InnerVerdict iv = inner_certify(col, opt.tol, opt.horizon);
  const double inner_res =
      std::max({iv.commutator, iv.isometric_residual, iv.weak_defect, iv.partial_isometry_defect});
  Check inner{"inner", inner_res, opt.tol, iv.inner ? Verdict::pass : Verdict::fail, false, iv.reason};
  if (!iv.inner && iv.stability_inconclusive) inner.verdict = Verdict::inconclusive;
  rep.add(inner);

  const PurityReport pu = pure_check(col.D);
  rep.add({"pure", pu.sigma_max, 1.0 - kPurityTol, pu.pure ? Verdict::pass : Verdict::fail, false, ""});
  rep.require({"contractive"});
}

void run_realize(const Json& j, const Options& opt, Report& rep) {
  const OutputPair pair = io::pair_from_json(j);
  rep.add(below("pair_contractive", std::max(0.0, norm2(pair.stacked()) - 1.0), opt.tol));
  rep.add(below("pair_isometric", pair.isometric_residual(), opt.tol));
  const Colligation col = cholesky_complete(pair, opt.tol);
  const StructureReport sr = structure_report(col, opt.tol);
  rep.add(below("coisometric", sr.coisometry_residual, opt.tol));
  rep.add(below("commutative", sr.commutator, opt.tol));
  rep.artifacts()["colligation"] = io::to_json(col);
  rep.require({"pair_contractive", "coisometric"});
}

void run_representer(const Json& j, const Options& opt, Report& rep, bool renormalize) {
  const InterpolationSpec spec = io::spec_from_json(j);
  const PipelineResult res = representer_pipeline(spec, opt.tol, renormalize);
  rep.add(below("membership", res.membership_residual, opt.tol));
  rep.add(below("coisometric", res.structure.coisometry_residual, opt.tol));
  rep.add(below("commutative", res.structure.commutator, opt.tol));
  Check inner{"inner",
              std::max({res.inner.commutator, res.inner.isometric_residual, res.inner.weak_defect,
                        res.inner.partial_isometry_defect}),
              opt.tol, res.inner.inner ? Verdict::pass : Verdict::fail, false, res.inner.reason};
  if (!res.inner.inner && res.inner.stability_inconclusive) inner.verdict = Verdict::inconclusive;
  rep.add(inner);
  Json cert;
  cert["variant"] = InterpolationSpec::variant_name(spec.variant);
  cert["renormalized"] = res.renormalized;
  cert["membership_residual"] = res.membership_residual;
  cert["membership_cap"] = res.membership_cap;
  cert["pair_isometric_residual"] = res.used_pair.isometric_residual();
  cert["commutator"] = res.structure.commutator;
  cert["inner"] = res.inner.inner;
  rep.artifacts()["colligation"] = io::to_json(res.col);
  rep.artifacts()["certificate"] = cert;
  rep.require({"membership", "coisometric", "commutative", "inner"});
}

Mat parse_param(const std::string& text, Eigen::Index rows, Eigen::Index cols) {
  if (text.empty()) return Mat();
  const Json j = io::parse(text, "--param");
  if (j.is_number() || (j.is_array() && j.size() == 2 && j[0].is_number())) {
    if (rows * cols != 1) {
      throw io::InputError("--param", "expected a " + std::to_string(rows) + " x " + std::to_string(cols) + " matrix");
    }
    return Mat::Constant(1, 1, io::decode_scalar(j, "--param"));
  }
  return io::decode_matrix(j, rows, cols, "--param");
}

void run_model(const Json& j, const Options& opt, Report& rep, const std::string& param, int hks_cap) {
  const TruncatedSeries s = io::series_from_json(j);
  const FunctionSubspace h = hks_subspace(s, hks_cap, 1e-9, opt.seed);
  const GleasonResult g = gleason_model_pair(h);
  rep.add(below("gleason_membership", g.membership_residual, 1e-9));
  rep.add(below("gleason_inequality", std::max(0.0, -g.inequality_min_eig), opt.tol));
  const ModelRealizationFamily fam = model_family(s, h, g.pair, opt.tol, opt.seed);
  rep.add(below("family_fit", fam.fit_residual, 1e-9));
  const Mat x = parse_param(param, fam.free_rows(), fam.free_cols());
  const Colligation col = assemble(fam, x, opt.tol);

  const StructureReport sr = structure_report(col, opt.tol);
  rep.add(below("contractive", std::max(0.0, sr.sigma_max - 1.0), opt.tol));
  const WeakCoisometryReport wc = weakly_coisometric_check(col, fam.dsub, opt.tol);
  rep.add(below("weakly_coisometric", wc.defect, opt.tol));
  const TruncatedSeries back = taylor(col, s.cap());
  rep.add(below("reproduces_multiplier", back.distance(s), opt.tol));
  rep.add(below("unitary", std::max(sr.isometry_residual, sr.coisometry_residual), opt.tol));

  Json family;
  family["dim_state"] = h.size();
  family["free_rows"] = fam.free_rows();
  family["free_cols"] = fam.free_cols();
  family["kernel_basis"] = io::encode_matrix(fam.u0);
  family["d_perp"] = io::encode_matrix(fam.d_perp);
  family["pair"] = io::to_json(fam.pair);
  rep.artifacts()["family"] = family;
  rep.artifacts()["colligation"] = io::to_json(col);
  rep.require({"gleason_membership", "gleason_inequality", "family_fit", "contractive", "weakly_coisometric",
               "reproduces_multiplier"});
}

void run_charfun(const Json& j, const Options& opt, Report& rep) {
  const RowContraction t = io::row_contraction_from_json(j);
  const Colligation col = halmos_dilation(t, opt.tol);
  const CoincidenceReport c = coincidence_conditions(col, opt.tol);
  rep.add(below("unitary", c.unitarity_defect, opt.tol));
  rep.add(below("commutative", c.commutator, opt.tol));
  rep.add({"pure", c.sigma_max_d, 1.0 - kPurityTol, c.pure ? Verdict::pass : Verdict::fail, false, ""});
  rep.add({"coincides", c.coincides ? 0.0 : 1.0, 0.0, c.coincides ? Verdict::pass : Verdict::fail, false,
           "unitary, commutative and pure"});
  rep.add({"trio_agrees", c.trio_agrees ? 0.0 : 1.0, 0.0, c.trio_agrees ? Verdict::pass : Verdict::fail, false,
           "B injective, C* injective, ||D|| < 1 agree"});
  rep.artifacts()["colligation"] = io::to_json(col);
  rep.require({"unitary", "trio_agrees"});
}

void run_probe_hankel(int n, Report& rep) {
  Json rows = Json::array();
  std::set<std::string> names;
  for (const HankelRow& r : hankel_probe(n)) {
    Json e;
    e["n"] = r.n;
    e["size"] = r.n + 1;
    e["rank"] = r.rank;
    e["det"] = r.det.str();
    rows.push_back(std::move(e));
    names.insert("full_rank_" + std::to_string(r.n));
    rep.add({"full_rank_" + std::to_string(r.n), static_cast<double>(r.n + 1 - r.rank), 0.0,
             r.full_rank() ? Verdict::pass : Verdict::fail, false, ""});
  }
  rep.artifacts()["hankel"] = rows;
  rep.require(names);
}

int emit(const Report& rep, const Options& opt) {
  const std::string text = opt.format == "text" ? rep.to_text() : io::dump(rep.to_json());
  if (opt.out.empty()) {
    std::cout << text;
  } else {
    write_file(opt.out, text);
  }
  return rep.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drury-Arveson realization toolkit: certify colligations, realize multipliers"};
  app.require_subcommand(1);
  Options opt;
  if (const char* env = std::getenv("ARVESON_TOL")) {
    try {
      opt.tol = std::stod(env);
    } catch (const std::exception&) {
      std::cerr << "error: ARVESON_TOL is not a number: " << env << "\n";
      return kExitInput;
    }
  }
  app.add_option("--tol", opt.tol, "Residual tolerance (default 1e-10, or $ARVESON_TOL)")->check(CLI::PositiveNumber);
  app.add_option("--grid-n", opt.grid_n, "Grid points for kernel checks")->check(CLI::Range(1, 200));
  app.add_option("--grid-radius", opt.grid_radius, "Radius of the sampling ball")->check(CLI::Range(0.0, 0.999));
  app.add_option("--seed", opt.seed, "Seed for every sampled quantity");
  app.add_option("--stability-horizon", opt.horizon, "Iteration budget for strong stability")->check(CLI::PositiveNumber);
  app.add_option("--cap", opt.cap, "Degree cap for observability series")->check(CLI::Range(1, 200));
  app.add_option("--format", opt.format, "Report format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--out", opt.out, "Write the report to this file instead of stdout");
  app.add_option("--artifact", opt.artifact, "Write the main artifact (colligation JSON) to this file");
  auto* req = app.add_option("--require", opt.require, "Comma-separated checks that decide the exit code (or 'all')");

  std::string input;
  auto* check = app.add_subcommand("check", "Structure, stability, kernel and inner checks for a colligation");
  check->add_option("colligation", input, "Colligation JSON")->required();
  auto* realize = app.add_subcommand("realize", "Cholesky completion of an output pair");
  realize->add_option("pair", input, "Output pair JSON")->required();
  auto* representer = app.add_subcommand("representer", "Inner representer from interpolation data");
  representer->add_option("spec", input, "Interpolation spec JSON")->required();
  bool no_renorm = false;
  representer->add_flag("--no-renormalize", no_renorm, "Reject non-isometric pairs instead of renormalizing");
  auto* model = app.add_subcommand("model", "Model realization family of a polynomial multiplier");
  model->add_option("multiplier", input, "Multiplier series JSON")->required();
  std::string param;
  int hks_cap = 6;
  model->add_option("--param", param, "Free parameter X as JSON (scalar or list of rows); zero if omitted");
  model->add_option("--hks-cap", hks_cap, "Degree cap for the kernel space")->check(CLI::Range(1, 40));
  auto* charfun = app.add_subcommand("charfun", "Characteristic function and Halmos dilation of a row contraction");
  charfun->add_option("row_contraction", input, "Row contraction JSON")->required();
  int hankel_n = 8;
  auto* hankel = app.add_subcommand("probe-hankel", "Exact ranks of the Hankel probe matrices");
  hankel->add_option("--n", hankel_n, "Largest n")->check(CLI::Range(0, kHankelMaxN));
  for (auto* sub : {check, realize, representer, model, charfun, hankel}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  }
  opt.require_set = req->count() > 0;

  CLI::App* sub = app.get_subcommands().front();
  Report rep(sub->get_name(), opt);
  try {
    Json j;
    if (sub != hankel) {
      const std::string bytes = read_file(input);
      rep.input(input, bytes);
      j = io::parse(bytes, input);
    }
    try {
      if (sub == check) run_check(j, opt, rep);
      if (sub == realize) run_realize(j, opt, rep);
      if (sub == representer) run_representer(j, opt, rep, !no_renorm);
      if (sub == model) run_model(j, opt, rep, param, hks_cap);
      if (sub == charfun) run_charfun(j, opt, rep);
      if (sub == hankel) run_probe_hankel(hankel_n, rep);
    } catch (const InconclusiveError& e) {
      std::cerr << "inconclusive: " << e.what() << "\n";
      rep.error(e.what());
      emit(rep, opt);
      return kExitInconclusive;
    } catch (const io::InputError&) {
      throw;
    } catch (const ShapeError& e) {
      throw io::InputError(input, e.what());
    } catch (const OutsideBall& e) {
      throw io::InputError(input, e.what());
    } catch (const Error& e) {
      rep.error(e.what());
    }
    if (!opt.artifact.empty()) {
      const Json report = rep.to_json();
      if (report.contains("artifacts") && report["artifacts"].contains("colligation")) {
        write_file(opt.artifact, io::dump(report["artifacts"]["colligation"]));
      }
    }
    return emit(rep, opt);
  } catch (const io::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  }
}
