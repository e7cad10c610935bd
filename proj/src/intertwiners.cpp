#include "qloop/intertwiners.hpp"

#include "qloop/errors.hpp"

namespace qloop {

std::vector<Gen> full_generators() { return {Gen::E0, Gen::E1, Gen::Ebar0, Gen::Ebar1, Gen::T0, Gen::T1}; }
std::vector<Gen> tl_subalgebra_generators() { return {Gen::E1, Gen::Ebar1, Gen::T1}; }

double intertwining_residual(const CMatrix& R, const GeneratorTable& gz, const GeneratorTable& gw,
                             const std::vector<Gen>& gens) {
  double worst = 0.0;
  const double scale = std::max(max_abs(R), 1e-300);
  for (Gen g : gens) {
    const CMatrix lhs = R * coproduct(g, gz, gw);
    const CMatrix rhs = coproduct_opposite(g, gz, gw) * R;
    worst = std::max(worst, max_abs(lhs - rhs) / scale);
  }
  return worst;
}

double check_intertwining_residual(const CMatrix& Y, const GeneratorTable& gz, const GeneratorTable& gw,
                                   const std::vector<Gen>& gens) {
  double worst = 0.0;
  const double scale = std::max(max_abs(Y), 1e-300);
  for (Gen g : gens) {
    const CMatrix lhs = Y * coproduct(g, gz, gw);
    const CMatrix rhs = coproduct(g, gw, gz) * Y;
    worst = std::max(worst, max_abs(lhs - rhs) / scale);
  }
  return worst;
}

namespace {

CMatrix stacked_R_system(const GeneratorTable& gz, const GeneratorTable& gw, const std::vector<Gen>& gens,
                         bool checked) {
  const int n = gz.dim * gw.dim;
  CMatrix sys(static_cast<Eigen::Index>(gens.size()) * n * n, n * n);
  Eigen::Index row = 0;
  for (Gen g : gens) {
    const CMatrix D = coproduct(g, gz, gw);
    const CMatrix Dp = checked ? coproduct(g, gw, gz) : coproduct_opposite(g, gz, gw);
    sys.middleRows(row, n * n) = sylvester_rows(D, Dp);
    row += n * n;
  }
  return sys;
}

}  // namespace

RMatrix solve_R(const RepParams& pz, const RepParams& pw, const std::vector<Gen>& gens, double tol) {
  if (pz.model != pw.model) throw InconsistentParams("R between different models");
  const GeneratorTable gz = build_rep(pz), gw = build_rep(pw);
  const int n = gz.dim * gw.dim;
  const auto ns = nullspace_detail(stacked_R_system(gz, gw, gens, false), tol);
  RMatrix out;
  out.pz = pz;
  out.pw = pw;
  out.nullity = static_cast<int>(ns.basis.size());
  if (ns.basis.empty()) throw NoSolution("intertwining system has trivial nullspace");
  if (ns.basis.size() != 1)
    throw NonUniqueSolution("nullspace dimension " + std::to_string(ns.basis.size()) + " (non-generic point?)");
  CMatrix R = unvec(ns.basis[0], n, n);
  const CMatrix ref = R_closed_form(pz, pw);
  Eigen::Index i = 0, j = 0;
  if (std::abs(R(0, 0)) > 1e-8 * max_abs(R) && std::abs(ref(0, 0)) > 0) {
    R *= ref(0, 0) / R(0, 0);
  } else {
    R.cwiseAbs().maxCoeff(&i, &j);
    if (std::abs(ref(i, j)) > 0) R *= ref(i, j) / R(i, j);
  }
  out.m = R;
  out.checked = intertwining_residual(R, gz, gw, full_generators()) < 1e-8;
  return out;
}

std::vector<CMatrix> solve_R_sub(const RepParams& pz, const RepParams& pw, const std::vector<Gen>& gens,
                                 double tol) {
  const GeneratorTable gz = build_rep(pz), gw = build_rep(pw);
  const int n = gz.dim * gw.dim;
  const auto ns = nullspace_detail(stacked_R_system(gz, gw, gens, true), tol);
  if (ns.basis.empty()) throw NonGenericFailure("no intertwiner for the subalgebra");
  std::vector<CMatrix> out;
  for (const auto& v : ns.basis) out.push_back(unvec(v, n, n));
  return out;
}

CMatrix R_closed_dense(cplx q, cplx x) {
  CMatrix R = CMatrix::Zero(4, 4);
  const cplx a = q * x - 1.0 / (q * x), b = x - 1.0 / x, c = q - 1.0 / q;
  R(0, 0) = R(3, 3) = a;
  R(1, 1) = R(2, 2) = b;
  R(1, 2) = R(2, 1) = c;
  return R;
}

std::array<cplx, 20> omega_weights(cplx q, cplx logx, double ell) {
  const cplx z = std::exp(logx);
  auto zp = [&](double p) { return std::exp(p * logx); };
  const cplx s = q * q - 1.0 / (q * q);
  const cplx A = std::pow(q, 3) * z + std::pow(q, -3) / z;
  const cplx zm = z - 1.0 / z;
  std::array<cplx, 20> w{};
  w[1] = zm * A + s * (std::pow(q, 3) + std::pow(q, -3));
  w[2] = w[4] = zp(-ell) * s * A;
  w[3] = w[5] = zp(ell) * s * A;
  w[6] = w[8] = -q * q * zp(ell) * s * zm;
  w[7] = w[9] = std::pow(q, -2) * zp(-ell) * s * zm;
  w[10] = w[11] = w[12] = w[13] = zm * A;
  w[14] = w[15] = (q * q * z - 1.0 / (q * q * z)) * A;
  w[16] = w[17] = zm * (q * z + 1.0 / (q * z));
  w[18] = zp(-2 * ell) * s * ((q * q + 1.0 / (q * q)) * q * z * z - (q - 1.0 / q) / (q * q));
  w[19] = zp(2 * ell) * s * ((q * q + 1.0 / (q * q)) / (q * z * z) + (q - 1.0 / q) * q * q);
  return w;
}

CMatrix R_closed_dilute(cplx q, cplx logx, double ell) {
  const auto w = omega_weights(q, logx, ell);
  // (row, col, omega index) in the basis (up,0,down) (x) (up,0,down)
  static const int layout[][3] = {{0, 0, 14}, {1, 1, 10}, {1, 3, 5},  {2, 2, 16}, {2, 4, 8},  {2, 6, 19},
                                  {3, 1, 2},  {3, 3, 12}, {4, 2, 7},  {4, 4, 1},  {4, 6, 6},  {5, 5, 13},
                                  {5, 7, 3},  {6, 2, 18}, {6, 4, 9},  {6, 6, 17}, {7, 5, 4},  {7, 7, 11},
                                  {8, 8, 15}};
  CMatrix R = CMatrix::Zero(9, 9);
  for (const auto& e : layout) R(e[0], e[1]) = w[e[2]];
  return R;
}

CMatrix R_closed_form(const RepParams& pz, const RepParams& pw) {
  if (pz.model == Model::Dense) return R_closed_dense(pz.q, pz.z() / pw.z());
  return R_closed_dilute(pz.q, pz.logz - pw.logz, pz.ell);
}

CMatrix rcheck(const CMatrix& R) {
  const int d = R.rows() == 4 ? 2 : 3;
  return permutation(d) * R;
}

CMatrix loop_gauge(Model m) {
  if (m == Model::Dense) return CMatrix::Identity(2, 2);
  CMatrix D = CMatrix::Identity(3, 3);
  D(1, 1) = kI;
  return D;
}

namespace {

std::vector<std::pair<std::string, CMatrix>> coideal_images(const CoidealSpec& c, const GeneratorTable& t) {
  std::vector<std::pair<std::string, CMatrix>> out;
  for (const auto& [name, s] : c.generators()) out.push_back({name, evaluate(s, t)});
  return out;
}

}  // namespace

double K_intertwining_residual(const CMatrix& K, const RepParams& p, const CoidealSpec& c, Side side) {
  const GeneratorTable gz = build_rep(p), gi = build_rep(p.inverse_z());
  const GeneratorTable& in = side == Side::Left ? gi : gz;
  const GeneratorTable& out = side == Side::Left ? gz : gi;
  const auto a = coideal_images(c, in), b = coideal_images(c, out);
  double worst = 0.0;
  const double scale = std::max(max_abs(K), 1e-300);
  for (std::size_t k = 0; k < a.size(); ++k)
    worst = std::max(worst, max_abs(K * a[k].second - b[k].second * K) / scale);
  return worst;
}

CMatrix K_closed_form(const RepParams& p, cplx r) {
  const cplx z = p.z();
  if (p.model == Model::Dense) {
    CMatrix K = CMatrix::Zero(2, 2);
    K(0, 0) = z + r / z;
    K(1, 1) = 1.0 / z + r * z;
    return K;
  }
  CMatrix K = CMatrix::Zero(3, 3);
  K(0, 0) = p.zpow(2 * p.ell) * (1.0 / z + r * z);
  K(1, 1) = z + r / z;
  K(2, 2) = p.zpow(-2 * p.ell) * (1.0 / z + r * z);
  return K;
}

CMatrix K_dilute_closed_form(const RepParams& p, cplx r) {
  const cplx z = p.z(), q2 = p.q * p.q;
  CMatrix K = CMatrix::Zero(3, 3);
  K(0, 0) = p.zpow(2 * p.ell) * (q2 * z + r / z);
  K(1, 1) = q2 / z + r * z;
  K(2, 2) = p.zpow(-2 * p.ell) * (q2 * z + r / z);
  return K;
}

KMatrix solve_K(const RepParams& p, const CoidealSpec& c, Side side, double tol) {
  if (p.model != c.model) throw InconsistentParams("coideal and representation models differ");
  const GeneratorTable gz = build_rep(p), gi = build_rep(p.inverse_z());
  const GeneratorTable& in = side == Side::Left ? gi : gz;
  const GeneratorTable& out = side == Side::Left ? gz : gi;
  const auto a = coideal_images(c, in), b = coideal_images(c, out);
  const int d = gz.dim;
  CMatrix sys(static_cast<Eigen::Index>(a.size()) * d * d, d * d);
  for (std::size_t k = 0; k < a.size(); ++k)
    sys.middleRows(static_cast<Eigen::Index>(k) * d * d, d * d) = sylvester_rows(a[k].second, b[k].second);
  const auto ns = nullspace_detail(sys, tol);
  if (ns.basis.empty()) throw NoSolution("no K-matrix for this coideal (r = " + std::to_string(c.r.real()) + "+" +
                                         std::to_string(c.r.imag()) + "i)");
  if (ns.basis.size() > 1) throw NonUniqueSolution("K-matrix nullspace dimension " + std::to_string(ns.basis.size()));
  CMatrix K = unvec(ns.basis[0], d, d);
  const RepParams pref = side == Side::Left ? p : p.inverse_z();
  const CMatrix ref = p.model == Model::Dense ? K_closed_form(pref, c.r) : K_dilute_closed_form(pref, c.r);
  const int idx = p.model == Model::Dense ? 0 : 1;
  if (std::abs(K(idx, idx)) > 1e-12 * max_abs(K) && std::abs(ref(idx, idx)) > 0) {
    K *= ref(idx, idx) / K(idx, idx);
  } else {
    Eigen::Index i = 0, j = 0;
    K.cwiseAbs().maxCoeff(&i, &j);
    K /= K(i, j);
  }
  return KMatrix{K, side, c.r, p};
}

RMaker solved_R_maker(Model m, double nu, cplx q, double ell) {
  return [=](cplx logx) {
    RepParams pz = std::isfinite(nu) ? (m == Model::Dense ? RepParams::dense(nu, logx) : RepParams::dilute(nu, logx, ell))
                                     : RepParams::generic(m, q, logx, ell);
    return solve_R(pz, pz.with_logz(0.0)).m;
  };
}

RMaker closed_R_maker(Model m, cplx q, double ell) {
  return [=](cplx logx) { return m == Model::Dense ? R_closed_dense(q, std::exp(logx)) : R_closed_dilute(q, logx, ell); };
}

CMatrix embed_two_site(const CMatrix& R, int d, int i, int j) {
  const CMatrix id = CMatrix::Identity(d, d);
  if (i == 0 && j == 1) return kron(R, id);
  if (i == 1 && j == 2) return kron(id, R);
  // sites (0, 2): conjugate (0,1) by the swap of sites 1 and 2.
  const CMatrix P23 = kron(id, permutation(d));
  return P23 * kron(R, id) * P23;
}

Report check_ybe(const RMaker& R, int d, cplx l1, cplx l2, cplx l3, double tol) {
  const CMatrix R12 = embed_two_site(R(l1 - l2), d, 0, 1);
  const CMatrix R13 = embed_two_site(R(l1 - l3), d, 0, 2);
  const CMatrix R23 = embed_two_site(R(l2 - l3), d, 1, 2);
  const CMatrix lhs = R12 * R13 * R23, rhs = R23 * R13 * R12;
  Report rep;
  rep.add("Yang-Baxter", "V(x)V(x)V", max_abs(lhs - rhs) / std::max(max_abs(lhs), 1e-300), tol);
  return rep;
}

Report check_reflection(const RMaker& R, const KMaker& K, int d, cplx l1, cplx l2, double tol) {
  const CMatrix P = permutation(d), id = CMatrix::Identity(d, d);
  const CMatrix Rm = R(l1 - l2), Rp = R(l1 + l2);
  const CMatrix K1 = kron(K(l1), id), K2 = kron(id, K(l2));
  const CMatrix lhs = Rm * K1 * (P * Rp * P) * K2;
  const CMatrix rhs = K2 * Rp * K1 * (P * Rm * P);
  Report rep;
  rep.add("reflection", "V(x)V", max_abs(lhs - rhs) / std::max(max_abs(lhs), 1e-300), tol);
  return rep;
}

CMatrix gauge_to_homogeneous(const CMatrix& Y, cplx logz, cplx logw, Model m) {
  if (m != Model::Dense) throw ModelUnsupported("homogeneous gauge implemented for the dense model only");
  auto half = [](cplx l) {
    CMatrix s = CMatrix::Zero(2, 2);
    s(0, 0) = std::exp(0.5 * l);
    s(1, 1) = std::exp(-0.5 * l);
    return s;
  };
  const CMatrix U = kron(half(logw), half(logz));
  const CMatrix Up = kron(half(logz), half(logw));
  return U.inverse() * Y * Up;
}

}  // namespace qloop
