#include "qloop/qalgebra.hpp"

#include <sstream>

#include "qloop/errors.hpp"

namespace qloop {

namespace {

const char* const kGenNames[kGenCount] = {"E0", "E1", "Ebar0", "Ebar1", "T0", "T1", "T0inv", "T1inv", "F0", "F1"};

CMatrix identity(int d) { return CMatrix::Identity(d, d); }

std::string fmt_ij(const char* what, int i, int j) {
  std::ostringstream os;
  os << what << "(" << i << "," << j << ")";
  return os.str();
}

Gen E(int i) { return i == 0 ? Gen::E0 : Gen::E1; }
Gen F(int i) { return i == 0 ? Gen::F0 : Gen::F1; }
Gen Eb(int i) { return i == 0 ? Gen::Ebar0 : Gen::Ebar1; }
Gen T(int i) { return i == 0 ? Gen::T0 : Gen::T1; }
Gen Tinv(int i) { return i == 0 ? Gen::T0inv : Gen::T1inv; }

CMatrix mpow(const CMatrix& m, int n) {
  CMatrix r = CMatrix::Identity(m.rows(), m.cols());
  for (int k = 0; k < n; ++k) r = r * m;
  return r;
}

// Relative residual: ||lhs - rhs|| / max(1, ||lhs||, ||rhs||).
double rel(const CMatrix& lhs, const CMatrix& rhs) {
  const double scale = std::max({1.0, max_abs(lhs), max_abs(rhs)});
  return max_abs(lhs - rhs) / scale;
}

}  // namespace

const char* model_name(Model m) { return m == Model::Dense ? "dense" : "dilute"; }

std::optional<Model> model_from_name(const std::string& s) {
  if (s == "dense") return Model::Dense;
  if (s == "dilute") return Model::Dilute;
  return std::nullopt;
}

const char* gen_name(Gen g) { return kGenNames[static_cast<int>(g)]; }

std::optional<Gen> gen_from_name(const std::string& s) {
  for (int k = 0; k < kGenCount; ++k)
    if (s == kGenNames[k]) return static_cast<Gen>(k);
  return std::nullopt;
}

int gen_index(Gen g) {
  switch (g) {
    case Gen::E0:
    case Gen::Ebar0:
    case Gen::T0:
    case Gen::T0inv:
    case Gen::F0:
      return 0;
    default:
      return 1;
  }
}

bool is_raising(Gen g) { return g == Gen::E0 || g == Gen::E1 || g == Gen::Ebar0 || g == Gen::Ebar1; }
Gen cartan_of(Gen g) { return T(gen_index(g)); }
Gen cartan_inv_of(Gen g) { return Tinv(gen_index(g)); }

bool CartanData::symmetrizable() const {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (d[i] * A[i][j] != d[j] * A[j][i]) return false;
  return true;
}

CartanData CartanData::a11() { return CartanData{{{{2, -2}, {-2, 2}}}, {1, 1}}; }
CartanData CartanData::a22() { return CartanData{{{{2, -4}, {-1, 2}}}, {1, 4}}; }
CartanData CartanData::for_model(Model m) { return m == Model::Dense ? a11() : a22(); }

cplx dense_q(double nu) { return -std::exp(2.0 * kPi * kI * nu); }

cplx dense_logq(double nu, QConvention conv) {
  return kI * kPi * (2.0 * nu + (conv == QConvention::Standard ? -1.0 : 1.0));
}

cplx dilute_q(double nu) { return std::exp(kI * kPi * (nu / 2.0 - 0.25)); }

double default_ell(double nu) {
  const double den = 3.0 * (2.0 * nu + 1.0);
  if (std::abs(den) < 1e-12) throw InconsistentParams("ell undefined at nu = -1/2");
  return 2.0 * nu / den;
}

RepParams RepParams::with_logz(cplx lz) const {
  RepParams p = *this;
  p.logz = lz;
  return p;
}

RepParams RepParams::dense(double nu, cplx logz, QConvention conv) {
  RepParams p;
  p.model = Model::Dense;
  p.nu = nu;
  p.conv = conv;
  p.logq = dense_logq(nu, conv);
  p.q = std::exp(p.logq);
  p.logz = logz;
  return p;
}

RepParams RepParams::dilute(double nu, cplx logz) { return dilute(nu, logz, default_ell(nu)); }

RepParams RepParams::dilute(double nu, cplx logz, double ell) {
  RepParams p;
  p.model = Model::Dilute;
  p.nu = nu;
  p.logq = kI * kPi * (nu / 2.0 - 0.25);
  p.q = std::exp(p.logq);
  p.logz = logz;
  p.ell = ell;
  p.phi_q = std::sqrt(p.q + 1.0 / p.q);
  return p;
}

RepParams RepParams::generic(Model m, cplx q, cplx logz, double ell) {
  RepParams p;
  p.model = m;
  p.q = q;
  p.logq = std::log(q);
  p.logz = logz;
  if (m == Model::Dilute) {
    p.ell = ell;
    p.phi_q = std::sqrt(q + 1.0 / q);
  }
  return p;
}

void RepParams::validate() const {
  if (!std::isfinite(q.real()) || !std::isfinite(q.imag()) || std::abs(q) == 0.0)
    throw InconsistentParams("q must be finite and nonzero");
  if (!std::isfinite(logz.real()) || !std::isfinite(logz.imag())) throw InconsistentParams("z must be finite");
  if (std::abs(std::exp(logq) - q) > 1e-10 * std::max(1.0, std::abs(q)))
    throw InconsistentParams("log q branch does not match q");
  if (std::isfinite(nu)) {
    const cplx expect = model == Model::Dense ? dense_q(nu) : dilute_q(nu);
    if (std::abs(expect - q) > 1e-10) throw InconsistentParams("q does not match nu");
  }
  if (model == Model::Dilute) {
    if (std::abs(phi_q * phi_q - (q + 1.0 / q)) > 1e-10) throw InconsistentParams("phi(q)^2 != q + 1/q");
    if (std::isfinite(nu) && std::abs(2.0 * nu + 1.0) < 1e-12) throw InconsistentParams("nu = -1/2");
  }
}

GeneratorTable build_rep(const RepParams& p) {
  p.validate();
  GeneratorTable t;
  t.model = p.model;
  t.q = p.q;
  const cplx q = p.q;
  if (p.model == Model::Dense) {
    t.dim = 2;
    const cplx z = p.z();
    CMatrix m = CMatrix::Zero(2, 2);
    m(1, 0) = z;
    t[Gen::E0] = m;
    m.setZero();
    m(0, 1) = 1.0 / z;
    t[Gen::Ebar0] = m;
    m.setZero();
    m(0, 1) = z;
    t[Gen::E1] = m;
    m.setZero();
    m(1, 0) = 1.0 / z;
    t[Gen::Ebar1] = m;
    t[Gen::T0] = CMatrix::Zero(2, 2);
    t[Gen::T0].diagonal() << 1.0 / q, q;
    t[Gen::T1] = CMatrix::Zero(2, 2);
    t[Gen::T1].diagonal() << q, 1.0 / q;
  } else {
    t.dim = 3;
    const cplx phi = p.phi_q;
    CMatrix m = CMatrix::Zero(3, 3);
    m(1, 0) = 1.0;
    m(2, 1) = q;
    t[Gen::E0] = p.zpow(1.0 - p.ell) * phi * m;
    m.setZero();
    m(0, 2) = 1.0;
    t[Gen::E1] = p.zpow(2.0 * p.ell) * m;
    m.setZero();
    m(0, 1) = 1.0 / q;
    m(1, 2) = 1.0;
    t[Gen::Ebar0] = p.zpow(p.ell - 1.0) * phi * m;
    m.setZero();
    m(2, 0) = 1.0;
    t[Gen::Ebar1] = p.zpow(-2.0 * p.ell) * m;
    t[Gen::T0] = CMatrix::Zero(3, 3);
    t[Gen::T0].diagonal() << std::pow(q, -2), 1.0, std::pow(q, 2);
    t[Gen::T1] = CMatrix::Zero(3, 3);
    t[Gen::T1].diagonal() << std::pow(q, 4), 1.0, std::pow(q, -4);
  }
  const CartanData c = CartanData::for_model(p.model);
  for (int i = 0; i < 2; ++i) {
    t[Tinv(i)] = t[T(i)].inverse();
    // Ebar_i = q^{d_i} T_i F_i
    t[F(i)] = std::pow(q, -c.d[i]) * t[Tinv(i)] * t[Eb(i)];
  }
  return t;
}

CMatrix coproduct(Gen g, const GeneratorTable& a, const GeneratorTable& b) {
  const CMatrix ia = identity(a.dim), ib = identity(b.dim);
  if (is_raising(g)) return kron(a[g], ib) + kron(a[cartan_of(g)], b[g]);
  if (g == Gen::F0 || g == Gen::F1) return kron(a[g], b[cartan_inv_of(g)]) + kron(ia, b[g]);
  return kron(a[g], b[g]);
}

CMatrix coproduct_opposite(Gen g, const GeneratorTable& a, const GeneratorTable& b) {
  const CMatrix ia = identity(a.dim), ib = identity(b.dim);
  if (is_raising(g)) return kron(ia, b[g]) + kron(a[g], b[cartan_of(g)]);
  if (g == Gen::F0 || g == Gen::F1) return kron(a[cartan_inv_of(g)], b[g]) + kron(a[g], ib);
  return kron(a[g], b[g]);
}

GeneratorTable coproduct_table(const GeneratorTable& a, const GeneratorTable& b) {
  GeneratorTable t;
  t.model = a.model;
  t.q = a.q;
  t.dim = a.dim * b.dim;
  for (int k = 0; k < kGenCount; ++k) t.m[k] = coproduct(static_cast<Gen>(k), a, b);
  return t;
}

CMatrix evaluate(const FormalSum& s, const GeneratorTable& t) {
  CMatrix out = CMatrix::Zero(t.dim, t.dim);
  for (const auto& term : s) {
    CMatrix w = identity(t.dim);
    for (Gen g : term.word) w = w * t[g];
    out += term.coeff * w;
  }
  return out;
}

cplx q_bracket(int n, cplx q) { return (std::pow(q, n) - std::pow(q, -n)) / (q - 1.0 / q); }

cplx q_binomial(int m, int k, cplx q) {
  if (k < 0 || k > m) return 0.0;
  cplx num = 1.0, den = 1.0;
  for (int j = 0; j < k; ++j) {
    num *= std::pow(q, m - j) - std::pow(q, -(m - j));
    den *= std::pow(q, j + 1) - std::pow(q, -(j + 1));
  }
  return num / den;
}

Report check_defining_relations(const GeneratorTable& t, const CartanData& c, cplx q, double tol,
                                const std::string& tag) {
  Report rep;
  const CMatrix id = identity(t.dim);
  for (int i = 0; i < 2; ++i) {
    rep.add("T T^-1 = 1", tag + ":" + std::to_string(i), rel(t[T(i)] * t[Tinv(i)], id), tol);
    rep.add("T^-1 T = 1", tag + ":" + std::to_string(i), rel(t[Tinv(i)] * t[T(i)], id), tol);
    rep.add("Ebar = q^d T F", tag + ":" + std::to_string(i),
            rel(t[Eb(i)], std::pow(q, c.d[i]) * t[T(i)] * t[F(i)]), tol);
  }
  rep.add("[T0,T1] = 0", tag, rel(t[Gen::T0] * t[Gen::T1], t[Gen::T1] * t[Gen::T0]), tol);
  for (int i = 0; i < 2; ++i) {
    const cplx qi = std::pow(q, c.d[i]);
    for (int j = 0; j < 2; ++j) {
      const cplx f = std::pow(q, c.d[i] * c.A[i][j]);
      rep.add("T E T^-1", tag + ":" + fmt_ij("", i, j), rel(t[T(i)] * t[E(j)] * t[Tinv(i)], f * t[E(j)]), tol);
      rep.add("T F T^-1", tag + ":" + fmt_ij("", i, j), rel(t[T(i)] * t[F(j)] * t[Tinv(i)], t[F(j)] / f), tol);
      CMatrix rhs = CMatrix::Zero(t.dim, t.dim);
      if (i == j) rhs = (t[T(i)] - t[Tinv(i)]) / (qi - 1.0 / qi);
      rep.add("[E,F]", tag + ":" + fmt_ij("", i, j), rel(t[E(i)] * t[F(j)] - t[F(j)] * t[E(i)], rhs), tol);
      if (i == j) continue;
      const int n = 1 - c.A[i][j];
      CMatrix se = CMatrix::Zero(t.dim, t.dim), sf = CMatrix::Zero(t.dim, t.dim);
      for (int k = 0; k <= n; ++k) {
        const cplx coeff = (k % 2 ? -1.0 : 1.0) * q_binomial(n, k, qi);
        se += coeff * mpow(t[E(i)], n - k) * t[E(j)] * mpow(t[E(i)], k);
        sf += coeff * mpow(t[F(i)], n - k) * t[F(j)] * mpow(t[F(i)], k);
      }
      const double scale = std::max(1.0, std::pow(max_abs(t[E(i)]), n) * max_abs(t[E(j)]));
      const double scalef = std::max(1.0, std::pow(max_abs(t[F(i)]), n) * max_abs(t[F(j)]));
      rep.add("q-Serre E", tag + ":" + fmt_ij("", i, j), max_abs(se) / scale, tol);
      rep.add("q-Serre F", tag + ":" + fmt_ij("", i, j), max_abs(sf) / scalef, tol);
    }
  }
  return rep;
}

Report check_coproduct_relations(const GeneratorTable& a, const GeneratorTable& b, const CartanData& c,
                                 double tol) {
  return check_defining_relations(coproduct_table(a, b), c, a.q, tol, "coproduct");
}

namespace {

void check_position(std::size_t L, int x) {
  if (x < 1 || static_cast<std::size_t>(x) > L)
    throw PositionOutOfRange("x = " + std::to_string(x) + " outside 1.." + std::to_string(L));
}

}  // namespace

CMatrix coproduct_insert(const std::vector<GeneratorTable>& sites, Gen label, int x, TailSide side) {
  check_position(sites.size(), x);
  std::vector<CMatrix> ops;
  ops.reserve(sites.size());
  const bool f_type = label == Gen::F0 || label == Gen::F1;
  if (!is_raising(label) && !f_type) throw InconsistentParams("insertions need a raising or F generator");
  for (std::size_t s = 0; s < sites.size(); ++s) {
    const auto& t = sites[s];
    const int pos = static_cast<int>(s) + 1;
    if (pos == x) {
      if (side == TailSide::Right && is_raising(label))
        ops.push_back(-t[cartan_inv_of(label)] * t[label]);
      else
        ops.push_back(t[label]);
    } else if (f_type) {
      // Delta(F) = F (x) T^-1 + 1 (x) F
      ops.push_back(pos > x ? t[cartan_inv_of(label)] : identity(t.dim));
    } else if (side == TailSide::Left) {
      ops.push_back(pos < x ? t[cartan_of(label)] : identity(t.dim));
    } else {
      ops.push_back(pos > x ? t[cartan_inv_of(label)] : identity(t.dim));
    }
  }
  return kron_all(ops);
}

CMatrix word_tail(const GeneratorTable& t, const std::vector<Gen>& word) {
  CMatrix tail = identity(t.dim);
  for (Gen g : word) {
    if (is_raising(g))
      tail = tail * t[cartan_of(g)];
    else if (g == Gen::T0 || g == Gen::T1 || g == Gen::T0inv || g == Gen::T1inv)
      tail = tail * t[g];
    else
      throw InconsistentParams("left-tail current undefined for F letters");
  }
  return tail;
}

CMatrix local_current(const std::vector<GeneratorTable>& sites, const FormalSum& s, int x) {
  check_position(sites.size(), x);
  CMatrix out;
  for (const auto& term : s) {
    std::vector<CMatrix> ops;
    for (std::size_t k = 0; k < sites.size(); ++k) {
      const auto& t = sites[k];
      const int pos = static_cast<int>(k) + 1;
      if (pos < x) {
        ops.push_back(word_tail(t, term.word));
      } else if (pos == x) {
        CMatrix w = identity(t.dim);
        for (Gen g : term.word) w = w * t[g];
        ops.push_back(w);
      } else {
        ops.push_back(identity(t.dim));
      }
    }
    CMatrix m = term.coeff * kron_all(ops);
    if (out.size() == 0)
      out = m;
    else
      out += m;
  }
  return out;
}

CMatrix charge(const std::vector<GeneratorTable>& sites, Gen label) {
  if (sites.empty()) throw PositionOutOfRange("charge on zero sites");
  if (is_raising(label) || label == Gen::F0 || label == Gen::F1) {
    CMatrix out = coproduct_insert(sites, label, 1);
    for (std::size_t x = 2; x <= sites.size(); ++x) out += coproduct_insert(sites, label, static_cast<int>(x));
    return out;
  }
  std::vector<CMatrix> ops;
  for (const auto& t : sites) ops.push_back(t[label]);
  return kron_all(ops);
}

CMatrix charge(const std::vector<GeneratorTable>& sites, const FormalSum& s) {
  std::size_t dim = 1;
  for (const auto& t : sites) dim *= static_cast<std::size_t>(t.dim);
  const auto n = static_cast<Eigen::Index>(dim);
  CMatrix out = CMatrix::Zero(n, n);
  for (const auto& term : s) {
    CMatrix w = CMatrix::Identity(n, n);
    for (Gen g : term.word) w = w * charge(sites, g);
    out += term.coeff * w;
  }
  return out;
}

CMatrix adjoint_action_general(const CMatrix& J, const CMatrix& theta, const CMatrix& theta_hat,
                               const CMatrix& X) {
  return J * X - theta * X * theta_hat * J;
}

CMatrix adjoint_action(const GeneratorTable& t, Gen a, Gen b) {
  if (is_raising(a)) return adjoint_action_general(t[a], t[cartan_of(a)], t[cartan_inv_of(a)], t[b]);
  if (a == Gen::T0 || a == Gen::T1 || a == Gen::T0inv || a == Gen::T1inv) return t[a] * t[b] * t[a].inverse();
  // Delta(F) = F (x) T^-1 + 1 (x) F, S(F) = -F T, S(T^-1) = T.
  return t[a] * t[b] * t[cartan_of(a)] - t[b] * t[a] * t[cartan_of(a)];
}

CMatrix adjoint_action_sweedler(const GeneratorTable& t, Gen a, const CMatrix& X) {
  if (!is_raising(a)) throw InconsistentParams("sweedler form implemented for raising generators");
  // Delta(J) = J (x) 1 + T (x) J; antipode S(1) = 1, S(J) = -T^{-1} J.
  struct Piece {
    CMatrix left, right_antipode;
  };
  const CMatrix id = identity(t.dim);
  const std::vector<Piece> pieces = {{t[a], id}, {t[cartan_of(a)], -t[cartan_inv_of(a)] * t[a]}};
  CMatrix out = CMatrix::Zero(t.dim, t.dim);
  for (const auto& p : pieces) out += p.left * X * p.right_antipode;
  return out;
}

std::vector<std::pair<std::string, FormalSum>> CoidealSpec::generators() const {
  std::vector<std::pair<std::string, FormalSum>> g = {
      {"T0", {{1.0, {Gen::T0}}}}, {"T1", {{1.0, {Gen::T1}}}}, {"Q", Q}, {"Qbar", Qbar}};
  if (model == Model::Dilute) {
    g.push_back({"E1", {{1.0, {Gen::E1}}}});
    g.push_back({"Ebar1", {{1.0, {Gen::Ebar1}}}});
  }
  return g;
}

CoidealSpec CoidealSpec::dense(cplx q, cplx r) {
  CoidealSpec c;
  c.model = Model::Dense;
  c.q = q;
  c.r = r;
  c.Q = {{1.0, {Gen::E1}}, {r, {Gen::Ebar0}}};
  c.Qbar = {{1.0, {Gen::Ebar1}}, {r, {Gen::E0}}};
  return c;
}

CoidealSpec CoidealSpec::dilute(cplx q) { return dilute(q, kI / q); }

CoidealSpec CoidealSpec::dilute(cplx q, cplx r) {
  CoidealSpec c;
  c.model = Model::Dilute;
  c.q = q;
  c.r = r;
  c.Q = dilute_P(q);
  c.Q.push_back({r, {Gen::Ebar0}});
  // [Ebar1, Ebar0]_{q^4} - r q^2 E0
  c.Qbar = {{1.0, {Gen::Ebar1, Gen::Ebar0}}, {-std::pow(q, 4), {Gen::Ebar0, Gen::Ebar1}}, {-r * q * q, {Gen::E0}}};
  return c;
}

CoidealSpec CoidealSpec::for_model(Model m, cplx q, cplx r) { return m == Model::Dense ? dense(q, r) : dilute(q, r); }

FormalSum dilute_P(cplx q) { return {{1.0, {Gen::E1, Gen::E0}}, {-std::pow(q, -4), {Gen::E0, Gen::E1}}}; }

}  // namespace qloop
