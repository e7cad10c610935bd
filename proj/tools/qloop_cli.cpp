#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "qloop/currents.hpp"
#include "qloop/errors.hpp"
#include "qloop/json_io.hpp"
#include "qloop/sampling.hpp"

using namespace qloop;
using nlohmann::json;

namespace {

enum Exit { kPass = 0, kCheckFailed = 1, kBadInput = 2, kCapacity = 3 };

struct RunConfig {
  std::string command;
  std::string model = "dense";
  std::optional<double> nu, alpha;
  std::string r, xi;
  std::string size = "2x2";
  std::string geometry = "grid";
  std::vector<int> defects;
  std::uint64_t seed = 1;
  int samples = 20;
  double tol = 1e-9;
  bool tol_given = false;
  std::string out;
  std::string format = "json";
  std::string kind = "phi0";
  std::string ell = "holomorphic";
};

Model parse_model(const std::string& s) {
  auto m = model_from_name(s);
  if (!m) throw InconsistentParams("unknown model '" + s + "'");
  return *m;
}

// "a", "a,b" or "a+bi" style complex numbers.
cplx parse_complex(const std::string& s) {
  static const std::regex pair(R"(^\s*([-+0-9.eE]+)\s*,\s*([-+0-9.eE]+)\s*$)");
  static const std::regex alg(R"(^\s*([-+]?[0-9.eE]+)\s*([-+][0-9.eE]*)i\s*$)");
  static const std::regex imag(R"(^\s*([-+]?[0-9.eE]*)i\s*$)");
  std::smatch m;
  auto num = [&](const std::string& t) {
    std::size_t used = 0;
    double v = std::stod(t, &used);
    if (used != t.size()) throw InconsistentParams("malformed number '" + t + "'");
    return v;
  };
  auto coef = [&](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return num(t);
  };
  try {
    if (std::regex_match(s, m, pair)) return {num(m[1]), num(m[2])};
    if (std::regex_match(s, m, alg)) return {num(m[1]), coef(m[2])};
    if (std::regex_match(s, m, imag)) return {0.0, coef(m[1])};
    return {num(s), 0.0};
  } catch (const std::logic_error&) {
    throw InconsistentParams("malformed complex number '" + s + "'");
  }
}

std::pair<int, int> parse_size(const std::string& s) {
  static const std::regex re(R"(^(\d+)x(\d+)$)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw InconsistentParams("size must look like LxM");
  return {std::stoi(m[1]), std::stoi(m[2])};
}

double default_nu(Model m) { return m == Model::Dense ? 0.2 : -0.2; }

json config_json(const RunConfig& c) {
  json j = {{"command", c.command}, {"model", c.model},   {"seed", c.seed},
            {"samples", c.samples}, {"tol", c.tol},       {"format", c.format}};
  if (c.nu) j["nu"] = *c.nu;
  if (c.alpha) j["alpha"] = *c.alpha;
  if (c.command == "observables") {
    j["size"] = c.size;
    j["geometry"] = c.geometry;
    j["defects"] = c.defects;
    j["kind"] = c.kind;
    j["ell"] = c.ell;
  }
  if (!c.r.empty()) j["r"] = c.r;
  if (!c.xi.empty()) j["xi"] = c.xi;
  return j;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string text_report(const Report& r) {
  std::ostringstream s;
  for (const auto& e : r.entries)
    s << (e.pass() ? "PASS " : "FAIL ") << e.check << " @ " << e.location << ": " << fmt(e.value)
      << (e.expect_above ? " > " : " < ") << fmt(e.tol) << "\n";
  s << r.entries.size() - r.failures() << "/" << r.entries.size() << " checks passed\n";
  return s.str();
}

std::string text_matrix(const CMatrix& m) {
  std::ostringstream s;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      char buf[64];
      std::snprintf(buf, sizeof buf, " %+.6f%+.6fi", m(i, j).real(), m(i, j).imag());
      s << buf;
    }
    s << "\n";
  }
  return s.str();
}

struct Output {
  json doc;
  std::string text;
  int code = kPass;
};

// ---- check-algebra

Output cmd_check_algebra(const RunConfig& c) {
  const Model m = parse_model(c.model);
  if (c.samples < 1) throw InconsistentParams("samples must be positive");
  const double tol = c.tol_given ? c.tol : 1e-10;
  Sampler rng(c.seed);
  Report rep;
  const CartanData cartan = CartanData::for_model(m);
  for (int s = 0; s < c.samples; ++s) {
    RepParams a, b;
    if (c.nu) {
      a = m == Model::Dense ? RepParams::dense(*c.nu, rng.generic_log()) : RepParams::dilute(*c.nu, rng.generic_log());
      b = a.with_logz(rng.generic_log());
    } else {
      const cplx q = rng.generic_q();
      a = RepParams::generic(m, q, rng.generic_log());
      b = a.with_logz(rng.generic_log());
    }
    a.validate();
    const GeneratorTable ta = build_rep(a), tb = build_rep(b);
    const std::string tag = "sample " + std::to_string(s);
    rep.merge(check_defining_relations(ta, cartan, a.q, tol, tag));
    Report cp = check_coproduct_relations(ta, tb, cartan, tol);
    for (auto& e : cp.entries) e.location = tag + " " + e.location;
    rep.merge(cp);
  }
  Output o;
  o.doc = {{"residuals", report_json(rep)}, {"max_residual", rep.max_value()}};
  o.text = text_report(rep);
  o.code = rep.all_pass() ? kPass : kCheckFailed;
  return o;
}

// ---- solve-r / solve-k

RepParams model_point(Model m, double nu, cplx logz) {
  return m == Model::Dense ? RepParams::dense(nu, logz) : RepParams::dilute(nu, logz);
}

Output cmd_solve_r(const RunConfig& c) {
  const Model m = parse_model(c.model);
  const double nu = c.nu.value_or(default_nu(m));
  const double tol = c.tol_given ? c.tol : 1e-9;
  Sampler rng(c.seed);
  const RepParams pz = model_point(m, nu, rng.generic_log());
  const RepParams pw = pz.with_logz(rng.generic_log());
  pz.validate();
  const RMatrix R = solve_R(pz, pw);
  const GeneratorTable gz = build_rep(pz), gw = build_rep(pw);
  const CMatrix D = kron(loop_gauge(m), loop_gauge(m));
  const CMatrix gauged = D * R.m * D.inverse();
  const CMatrix closed = R_closed_form(pz, pw);

  Report rep;
  rep.add("nullspace_dimension", "solve_R", std::abs(R.nullity - 1), 0.5);
  rep.add("intertwining", "solve_R", intertwining_residual(R.m, gz, gw, full_generators()), tol);
  rep.add("closed_form", m == Model::Dense ? "direct" : "gauge D(x)D", max_abs(CMatrix(gauged - closed)), tol);

  Output o;
  o.doc = {{"params", {{"q", complex_json(pz.q)}, {"nu", nu}, {"logz", complex_json(pz.logz)},
                       {"logw", complex_json(pw.logz)}, {"ell", pz.ell}}},
           {"R", matrix_json(R.m)},
           {"raw_closed_form_diff", max_abs(CMatrix(R.m - closed))},
           {"residuals", report_json(rep)}};
  o.text = "R on V_z (x) V_w:\n" + text_matrix(R.m) + text_report(rep);
  o.code = rep.all_pass() ? kPass : kCheckFailed;
  return o;
}

Output cmd_solve_k(const RunConfig& c) {
  const Model m = parse_model(c.model);
  const double nu = c.nu.value_or(default_nu(m));
  const double tol = c.tol_given ? c.tol : 1e-9;
  if (!c.xi.empty()) throw InconsistentParams("solve-k takes r, not xi");
  Sampler rng(c.seed);
  const RepParams p = model_point(m, nu, rng.generic_log());
  p.validate();
  const cplx r = !c.r.empty() ? parse_complex(c.r) : (m == Model::Dense ? cplx(0.5) : kI / p.q);
  const CoidealSpec spec = CoidealSpec::for_model(m, p.q, r);

  Output o;
  o.doc = {{"params", {{"q", complex_json(p.q)}, {"nu", nu}, {"logz", complex_json(p.logz)}, {"ell", p.ell},
                       {"r", complex_json(r)}}}};
  KMatrix K;
  try {
    K = solve_K(p, spec);
  } catch (const NoSolution& e) {
    o.doc["error"] = {{"type", "NoSolution"}, {"message", e.what()}};
    o.text = std::string(e.what()) + "\n";
    o.code = kCheckFailed;
    return o;
  }
  const CMatrix closed = m == Model::Dense ? K_closed_form(p, r) : K_dilute_closed_form(p, r);
  Report rep;
  rep.add("intertwining", "left K", K_intertwining_residual(K.m, p, spec, Side::Left), tol);
  rep.add("closed_form", "left K", max_abs(CMatrix(K.m - closed)), tol);
  const CMatrix off = K.m - CMatrix(K.m.diagonal().asDiagonal());
  rep.add("diagonal", "left K", max_abs(off), tol);
  if (m == Model::Dilute) {
    // Outer entries differ only by z^{+-2l}.
    const cplx a = K.m(0, 0) * p.zpow(-2 * p.ell), b = K.m(2, 2) * p.zpow(2 * p.ell);
    rep.add("outer_pattern", "K00 z^-2l = K22 z^2l", std::abs(a - b), tol);
  }
  json diag = json::array();
  for (Eigen::Index i = 0; i < K.m.rows(); ++i) diag.push_back(complex_json(K.m(i, i)));
  o.doc["K"] = matrix_json(K.m);
  o.doc["diagonal"] = diag;
  o.doc["closed_form_intertwining"] = K_intertwining_residual(K_closed_form(p, r), p, spec, Side::Left);
  o.doc["residuals"] = report_json(rep);
  o.text = "left K:\n" + text_matrix(K.m) + text_report(rep);
  o.code = rep.all_pass() ? kPass : kCheckFailed;
  return o;
}

// ---- observables

std::string cell_label(const Domain& d, int ci) {
  const Cell& c = d.cells[ci];
  std::ostringstream s;
  s << cell_kind_name(c.kind) << "(" << c.X2 / 2.0 << "," << c.Y2 / 2.0 << ")";
  return s.str();
}

bool dh_expected(Model m, ObsKind k) {
  return m == Model::Dense || k == ObsKind::Phi0 || k == ObsKind::Phi0bar;
}

Output cmd_observables(const RunConfig& c) {
  const Model m = parse_model(c.model);
  const double nu = c.nu.value_or(default_nu(m));
  const double alpha = c.alpha.value_or(1.1);
  const double tol = c.tol_given ? c.tol : 1e-9;
  const auto [L, M] = parse_size(c.size);
  if (c.geometry != "grid" && c.geometry != "lightcone") throw InconsistentParams("geometry must be grid or lightcone");
  const bool lc = c.geometry == "lightcone";

  std::vector<ObsKind> kinds;
  if (c.kind == "all") {
    kinds = {ObsKind::Phi0, ObsKind::Phi1, ObsKind::Phi0bar, ObsKind::Phi1bar};
  } else {
    auto k = obs_kind_from_name(c.kind);
    if (!k || *k == ObsKind::Xi || *k == ObsKind::H) throw InconsistentParams("unsupported kind '" + c.kind + "'");
    kinds = {*k};
  }
  const bool psi = kinds.front() == ObsKind::Psi;
  if (psi && !lc) throw InconsistentParams("psi lives on the light-cone boundary");

  Domain d;
  if (lc) {
    const int pair = c.defects.empty() ? 1 : c.defects.front();
    if (c.defects.size() > 1) throw InconsistentParams("light-cone takes one defect pair index");
    d = light_cone(m, L, M, alpha, pair);
  } else {
    std::vector<int> def = c.defects;
    if (def.empty()) def = m == Model::Dense ? std::vector<int>{1, 2} : std::vector<int>{1};
    d = rhombic_grid(m, L, M, alpha, def);
  }
  const EnumOptions opt;
  if (d.bulk_count() > (m == Model::Dense ? opt.max_bulk_dense : opt.max_bulk_dilute))
    throw CapacityExceeded(std::to_string(d.bulk_count()) + " plaquettes exceed the enumeration cap");

  AngleDictionary dict;
  if (lc) {
    if (!c.r.empty() && !c.xi.empty()) throw InconsistentParams("give r or xi, not both");
    if (m == Model::Dense) {
      dict = AngleDictionary::light_cone(m, nu, alpha, 0.0);
      cplx r = 0.0;
      if (!c.r.empty()) r = parse_complex(c.r);
      if (!c.xi.empty()) r = r_from_deficit(nu, dict.z(), parse_complex(c.xi));
      dict = AngleDictionary::light_cone(m, nu, alpha, r);
    } else {
      if (!c.xi.empty()) throw InconsistentParams("dilute boundaries have no free deficit");
      dict = AngleDictionary::light_cone(m, nu, alpha);
      if (!c.r.empty() && std::abs(parse_complex(c.r) - dict.r) > 1e-12)
        throw InconsistentParams("dilute boundaries need r = i/q");
    }
  } else {
    if (!c.r.empty() || !c.xi.empty()) throw InconsistentParams("r and xi only apply to the light-cone");
    dict = AngleDictionary::grid(m, nu, alpha);
  }
  if (m == Model::Dilute) {
    if (c.ell == "holomorphic") dict = dict.with_ell(dilute_ell(nu, DiluteEll::Holomorphic));
    else if (c.ell != "reference") throw InconsistentParams("ell must be reference or holomorphic");
  }

  std::vector<ObservableField> fields;
  Report rep;
  if (psi) {
    const ObservableField f = psi_field(d, dict, opt);
    for (int t : left_boundary_slices(d))
      rep.add("boundary_dh", "t=" + std::to_string(t), std::abs(boundary_dh_residual(d, f, t)), tol);
    fields.push_back(f);
  } else {
    auto loop = loop_fields(d, dict, kinds, opt);
    const VertexNetwork net = build_network(d, dict, VertexSource::Algebraic);
    for (ObsKind k : kinds) {
      const ObservableField& lf = loop.at(k);
      const ObservableField vf = vertex_field(net, k);
      double dual = 0.0;
      for (const auto& [e, v] : lf.values) dual = std::max(dual, std::abs(v - vf.at(e)));
      rep.add(std::string("dual_method_") + obs_kind_name(k), "all edges", dual, tol);
      if (dh_expected(m, k))
        for (int ci : d.bulk_cells())
          rep.add(std::string("dh_") + obs_kind_name(k), cell_label(d, ci), std::abs(dh_residual(d, lf, ci)), tol);
      fields.push_back(lf);
      fields.push_back(vf);
    }
  }

  Output o;
  o.doc = observables_json(d, dict, fields, rep);
  o.doc["max_residual"] = rep.max_value();
  std::ostringstream s;
  for (const auto& f : fields)
    for (const auto& [e, v] : f.values) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%+.9f%+.9fi", v.real(), v.imag());
      s << obs_kind_name(f.kind) << " " << edge_label(d.edges[e]) << " " << method_name(f.method) << " " << buf << "\n";
    }
  o.text = s.str() + text_report(rep);
  o.code = rep.all_pass() ? kPass : kCheckFailed;
  return o;
}

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--model", c.model, "dense or dilute")->check(CLI::IsMember({"dense", "dilute"}));
  sub->add_option("--nu", c.nu, "crossing parameter");
  sub->add_option("--seed", c.seed, "seed for sampled parameter points");
  sub->add_option("--tol", c.tol, "residual tolerance")->each([&c](const std::string&) { c.tol_given = true; });
  sub->add_option("--out", c.out, "write output to this file instead of stdout");
  sub->add_option("--format", c.format, "json or text")->check(CLI::IsMember({"json", "text"}));
}

int emit(const RunConfig& c, json doc, const std::string& text) {
  std::string body;
  if (c.format == "json") {
    doc["config"] = config_json(c);
    body = doc.dump(2) + "\n";
  } else {
    body = text;
  }
  if (c.out.empty()) {
    std::cout << body;
  } else {
    std::ofstream f(c.out);
    if (!f) {
      std::cerr << "cannot open " << c.out << "\n";
      return kBadInput;
    }
    f << body;
  }
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-group loop model verification"};
  app.require_subcommand(1);
  RunConfig c;

  auto* alg = app.add_subcommand("check-algebra", "defining relations at sampled points");
  add_common(alg, c);
  alg->add_option("--samples", c.samples, "number of sampled points");

  auto* sr = app.add_subcommand("solve-r", "solve the R-matrix intertwining equation");
  add_common(sr, c);

  auto* sk = app.add_subcommand("solve-k", "solve the left K-matrix for a coideal");
  add_common(sk, c);
  sk->add_option("--r", c.r, "coideal parameter (re, re,im or a+bi)");
  sk->add_option("--xi", c.xi, "deficit angle (not accepted here)");

  auto* ob = app.add_subcommand("observables", "loop and vertex observables with residual maps");
  add_common(ob, c);
  ob->add_option("--alpha", c.alpha, "rhombus angle in (0, pi)");
  ob->add_option("--size", c.size, "LxM");
  ob->add_option("--geometry", c.geometry, "grid or lightcone")->check(CLI::IsMember({"grid", "lightcone"}));
  ob->add_option("--defects", c.defects, "defect positions (grid) or pair index (light-cone)")->delimiter(',');
  ob->add_option("--kind", c.kind, "phi0, phi1, phi0bar, phi1bar, psi or all");
  ob->add_option("--r", c.r, "boundary parameter");
  ob->add_option("--xi", c.xi, "boundary deficit angle");
  ob->add_option("--ell", c.ell, "dilute l: holomorphic or reference")->check(CLI::IsMember({"holomorphic", "reference"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  try {
    Output o;
    if (*alg) c.command = "check-algebra", o = cmd_check_algebra(c);
    else if (*sr) c.command = "solve-r", o = cmd_solve_r(c);
    else if (*sk) c.command = "solve-k", o = cmd_solve_k(c);
    else c.command = "observables", o = cmd_observables(c);
    if (int rc = emit(c, o.doc, o.text); rc != kPass) return rc;
    return o.code;
  } catch (const CapacityExceeded& e) {
    std::cerr << e.what() << "\n";
    return kCapacity;
  } catch (const NoSolution& e) {
    std::cerr << e.what() << "\n";
    return kCheckFailed;
  } catch (const NonUniqueSolution& e) {
    std::cerr << e.what() << "\n";
    return kCheckFailed;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kBadInput;
  }
}
