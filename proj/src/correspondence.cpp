#include "qloop/correspondence.hpp"

#include <cmath>

#include "qloop/errors.hpp"

namespace qloop {

RepParams AngleDictionary::rep(EdgeKind k) const {
  const cplx lz = k == EdgeKind::Slanted ? logz : logw;
  RepParams p = model == Model::Dense ? RepParams::dense(nu, lz, conv) : RepParams::dilute(nu, lz, ell);
  p.alpha = alpha;
  return p;
}

CoidealSpec AngleDictionary::coideal() const { return CoidealSpec::for_model(model, q, r); }

cplx deficit_from_r(double nu, cplx z, cplx r) {
  const cplx ratio = (1.0 + r / (z * z)) / (1.0 + r * z * z);
  return std::log(ratio) / (2.0 * kI * nu);
}

cplx r_from_deficit(double nu, cplx z, cplx xi) {
  // e (1 + r z^2) = 1 + r z^-2  =>  r = (1 - e) / (e z^2 - z^-2)
  const cplx e = std::exp(2.0 * kI * nu * xi);
  return (1.0 - e) / (e * z * z - 1.0 / (z * z));
}

AngleDictionary AngleDictionary::grid(Model m, double nu, double alpha, cplx logw, QConvention conv) {
  AngleDictionary d;
  d.model = m;
  d.nu = nu;
  d.alpha = alpha;
  d.conv = conv;
  if (m == Model::Dense) {
    d.logq = dense_logq(nu, conv);
    d.q = std::exp(d.logq);
    d.logw = logw;
    d.logz = logw - 2.0 * kI * nu * alpha;
  } else {
    d.q = dilute_q(nu);
    d.logq = kI * kPi * (nu / 2 - 0.25);
    d.ell = default_ell(nu);
    d.logw = logw;
    d.logz = logw - kI * nu * alpha / d.ell;
  }
  return d;
}

AngleDictionary AngleDictionary::light_cone(Model m, double nu, double alpha, cplx r, QConvention conv) {
  AngleDictionary d;
  d.model = m;
  d.nu = nu;
  d.alpha = alpha;
  d.conv = conv;
  d.r = r;
  d.has_boundary = true;
  if (m == Model::Dense) {
    d.logq = dense_logq(nu, conv);
    d.q = std::exp(d.logq);
    d.logz = -kI * nu * alpha;
    d.xi = deficit_from_r(nu, d.z(), r);
  } else {
    d.q = dilute_q(nu);
    d.logq = kI * kPi * (nu / 2 - 0.25);
    d.ell = default_ell(nu);
    d.logz = -kI * nu * alpha / (2.0 * d.ell);
  }
  d.logw = -d.logz;
  return d;
}

AngleDictionary AngleDictionary::light_cone(Model m, double nu, double alpha) {
  const cplx q = m == Model::Dense ? dense_q(nu) : dilute_q(nu);
  return light_cone(m, nu, alpha, m == Model::Dense ? cplx(0.0) : kI / q);
}

double dilute_ell(double nu, DiluteEll e) {
  return (e == DiluteEll::Reference ? 2.0 : 4.0) * nu / (3.0 * (2.0 * nu + 1.0));
}

AngleDictionary AngleDictionary::with_ell(double l) const {
  if (model != Model::Dilute) throw ModelUnsupported("l is a dilute parameter");
  AngleDictionary d = *this;
  d.ell = l;
  if (has_boundary) {
    d.logz = -kI * nu * alpha / (2.0 * l);
    d.logw = -d.logz;
  } else {
    d.logz = logw - kI * nu * alpha / l;
  }
  return d;
}

LoopWeights AngleDictionary::loop_weights() const {
  LoopWeights w = model == Model::Dense ? LoopWeights::dense(nu, q, x()) : LoopWeights::dilute(nu, q, x());
  if (model == Model::Dense) {
    w.xi = xi;
  } else {
    const cplx zz = z(), q2 = q * q;
    w.rho_left = q2 / zz + r * zz;
    w.kappa_left = q2 * zz + r / zz;
    w.rho_right = q2 * zz + r / zz;
    w.kappa_right = q2 / zz + r * zz;
  }
  return w;
}

double AngleDictionary::consistency_residual() const {
  double res = 0.0;
  const cplx target = std::exp(-2.0 * kI * nu * alpha);
  if (model == Model::Dense) {
    res = std::abs(x() - target);
    if (has_boundary) {
      const cplx zz = z();
      res = std::max(res, std::abs(std::exp(2.0 * kI * nu * xi) - (1.0 + r / (zz * zz)) / (1.0 + r * zz * zz)));
    }
  } else {
    res = std::abs(std::exp(2.0 * ell * logx()) - target);
    res = std::max(res, std::abs(q * q * q * q - (-std::exp(2.0 * kI * kPi * nu))));
  }
  return res;
}

namespace {

bool is_occupied(Model m, int s) { return m == Model::Dense || s != 1; }
bool is_up(int s) { return s == 0; }

bool has_deficit_cell(const Domain& d, const Cell& c, TileKind k) {
  return d.model == Model::Dense && k == TileKind::KArc && (c.kind == CellKind::KLeft || c.kind == CellKind::KRight);
}

const Domain& reference_grid(Model m, double alpha) {
  thread_local Domain cache;
  thread_local bool built = false;
  if (!built || cache.model != m || cache.alpha != alpha) {
    cache = rhombic_grid(m, 1, 1, alpha);
    built = true;
  }
  return cache;
}

}  // namespace

std::vector<cplx> dress_cell(const Domain& d, const Cell& c, TileKind k, double nu, cplx xi) {
  const int dim = d.dim();
  const int n = static_cast<int>(c.slots.size());
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= dim;
  std::vector<cplx> out(total, 0.0);
  const TileSpec& spec = tile_spec(k);
  std::vector<int> s(n, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (int i = n; i-- > 0;) {
      s[i] = static_cast<int>(rem % dim);
      rem /= dim;
    }
    cplx val = 1.0;
    bool ok = true;
    for (int e : spec.empty)
      if (is_occupied(d.model, s[e])) ok = false;
    if (spec.terminal && !is_occupied(d.model, s[0])) ok = false;
    for (const auto& [i, j] : spec.arcs) {
      if (!ok) break;
      if (!is_occupied(d.model, s[i]) || !is_occupied(d.model, s[j])) {
        ok = false;
        break;
      }
      const bool in_i = is_up(s[i]) == c.slots[i].up_enters;
      const bool in_j = is_up(s[j]) == c.slots[j].up_enters;
      if (in_i == in_j) {
        ok = false;
        break;
      }
      double g = in_i ? slot_turn(d, c, i, j) : slot_turn(d, c, j, i);
      cplx turn = g;
      if (has_deficit_cell(d, c, k)) turn -= static_cast<double>((g > 0) - (g < 0)) * xi;
      val *= std::exp(kI * nu * turn);
    }
    if (ok) out[idx] = val;
  }
  return out;
}

std::vector<cplx> rcheck_to_slots(const CMatrix& rc, int d) {
  std::vector<cplx> t(static_cast<std::size_t>(d * d * d * d));
  for (int sl = 0; sl < d; ++sl)
    for (int sb = 0; sb < d; ++sb)
      for (int st = 0; st < d; ++st)
        for (int sr = 0; sr < d; ++sr) t[((sl * d + sb) * d + st) * d + sr] = rc(st * d + sr, sl * d + sb);
  return t;
}

CMatrix slots_to_rcheck(const std::vector<cplx>& t, int d) {
  CMatrix rc(d * d, d * d);
  for (int sl = 0; sl < d; ++sl)
    for (int sb = 0; sb < d; ++sb)
      for (int st = 0; st < d; ++st)
        for (int sr = 0; sr < d; ++sr) rc(st * d + sr, sl * d + sb) = t[((sl * d + sb) * d + st) * d + sr];
  return rc;
}

CMatrix dress_tile(Model m, TileKind k, double nu, double alpha) {
  const Domain& g = reference_grid(m, alpha);
  return slots_to_rcheck(dress_cell(g, g.cells[0], k, nu), g.dim());
}

CMatrix assemble_R(const AngleDictionary& dict) {
  const LoopWeights w = dict.loop_weights();
  const int d = dict.model == Model::Dense ? 2 : 3;
  CMatrix rc = CMatrix::Zero(d * d, d * d);
  for (const auto& [k, wt] : w.bulk) rc += wt * dress_tile(dict.model, k, dict.nu, dict.alpha);
  return rc;
}

namespace {

CMatrix half_cell_matrix(const Domain& lc, const std::vector<cplx>& t) {
  const int d = lc.dim();
  CMatrix K(d, d);
  for (int s0 = 0; s0 < d; ++s0)
    for (int s1 = 0; s1 < d; ++s1) K(s1, s0) = t[s0 * d + s1];
  return K;
}

std::vector<cplx> cell_sum(const Domain& d, const Cell& c, const LoopWeights& w, double nu, cplx xi) {
  std::vector<cplx> acc;
  for (TileKind k : tile_options(d.model, c.kind)) {
    const auto t = dress_cell(d, c, k, nu, xi);
    const cplx wt = w.tile_weight(c, k);
    if (acc.empty()) acc.assign(t.size(), 0.0);
    for (std::size_t i = 0; i < t.size(); ++i) acc[i] += wt * t[i];
  }
  return acc;
}

}  // namespace

CMatrix assemble_K(const AngleDictionary& dict, Side side) {
  const Domain lc = light_cone(dict.model, 2, 0, dict.alpha);
  const CellKind want = side == Side::Left ? CellKind::KLeft : CellKind::KRight;
  const LoopWeights w = dict.loop_weights();
  for (const Cell& c : lc.cells)
    if (c.kind == want) return half_cell_matrix(lc, cell_sum(lc, c, w, dict.nu, dict.xi));
  throw InconsistentParams("no K half-cell");
}

CMatrix assemble_K_reference_dilute(const AngleDictionary& dict) {
  if (dict.model != Model::Dilute) throw ModelUnsupported("reference dilute boundary weights");
  const cplx z = dict.z(), iq = kI / dict.q;
  const cplx rho = z + iq / z, kappa = 1.0 / z + iq * z;
  CMatrix K = CMatrix::Zero(3, 3);
  K(0, 0) = kappa * std::exp(-kI * dict.nu * dict.alpha);
  K(1, 1) = rho;
  K(2, 2) = kappa * std::exp(kI * dict.nu * dict.alpha);
  return K;
}

std::vector<cplx> decompose(const CMatrix& rc, const std::vector<CMatrix>& basis, double* resid) {
  const Eigen::Index n = rc.size();
  CMatrix A(n, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) A.col(k) = Eigen::Map<const CVector>(basis[k].data(), n);
  const CVector b = Eigen::Map<const CVector>(rc.data(), n);
  const CVector c = A.completeOrthogonalDecomposition().solve(b);
  if (resid) *resid = (A * c - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
  return std::vector<cplx>(c.data(), c.data() + c.size());
}

VertexNetwork build_network(const Domain& d, const AngleDictionary& dict, VertexSource src,
                            const std::map<int, CVector>& terminal_override) {
  if (d.model != dict.model) throw InconsistentParams("domain and dictionary models differ");
  VertexNetwork net;
  net.domain = &d;
  net.dict = dict;
  net.gauge = loop_gauge(d.model);
  const int dim = d.dim();
  const LoopWeights w = dict.loop_weights();

  CMatrix rc_alg, kl_alg, kr_alg;
  if (src == VertexSource::Algebraic) {
    const CMatrix G = kron(net.gauge, net.gauge);
    rc_alg = G * rcheck(solve_R(dict.rep_z(), dict.rep_w()).m) * G.inverse();
    if (d.geom == Geometry::LightCone) {
      const CoidealSpec c = dict.coideal();
      kl_alg = solve_K(dict.rep_z(), c, Side::Left).m;
      kr_alg = solve_K(dict.rep_z(), c, Side::Right).m;
      const CMatrix kl_loop = assemble_K(dict, Side::Left), kr_loop = assemble_K(dict, Side::Right);
      net.k_scale_left = best_scale(kl_alg, kl_loop);
      net.k_scale_right = best_scale(kr_alg, kr_loop);
      kl_alg /= net.k_scale_left;
      kr_alg /= net.k_scale_right;
    }
  }

  for (std::size_t ci = 0; ci < d.cells.size(); ++ci) {
    const Cell& c = d.cells[ci];
    Tensor t;
    for (const Slot& s : c.slots) {
      t.legs.push_back(s.edge);
      t.dims.push_back(dim);
    }
    const bool alg = src == VertexSource::Algebraic;
    if (alg && c.kind == CellKind::Bulk) {
      t.data = rcheck_to_slots(rc_alg, dim);
    } else if (alg && (c.kind == CellKind::KLeft || c.kind == CellKind::KRight)) {
      const CMatrix& K = c.kind == CellKind::KLeft ? kl_alg : kr_alg;
      t.data.resize(dim * dim);
      for (int s0 = 0; s0 < dim; ++s0)
        for (int s1 = 0; s1 < dim; ++s1) t.data[s0 * dim + s1] = K(s1, s0);
    } else if (c.kind == CellKind::Defect && terminal_override.count(c.slots[0].edge)) {
      const CVector& v = terminal_override.at(c.slots[0].edge);
      t.data.assign(v.data(), v.data() + v.size());
    } else {
      t.data = cell_sum(d, c, w, dict.nu, dict.xi);
    }
    net.tensors.push_back(std::move(t));
  }
  return net;
}

cplx contract(const VertexNetwork& net, const OpProduct& ops) {
  const Domain& d = *net.domain;
  std::vector<Tensor> ts = net.tensors;
  std::map<int, CMatrix> per_edge;
  for (const EdgeOp& op : ops) {
    if (op.edge < 0 || op.edge >= static_cast<int>(d.edges.size())) throw PositionOutOfRange("insertion edge");
    auto it = per_edge.find(op.edge);
    if (it == per_edge.end())
      per_edge.emplace(op.edge, op.m);
    else
      it->second = op.m * it->second;
  }
  int next = static_cast<int>(d.edges.size());
  for (const auto& [e, m] : per_edge) {
    const int consumer = d.edge_cells[e].second;
    for (int& leg : ts[consumer].legs)
      if (leg == e) leg = next;
    ts.push_back(Tensor::from_matrix(m, next, e));
    ++next;
  }
  return contract_network(std::move(ts));
}

PartitionResult partition_functions(const Domain& d, const AngleDictionary& dict, const EnumOptions& opt) {
  PartitionResult res;
  const LoopWeights w = dict.loop_weights();
  enumerate_configs(
      d,
      [&](const LoopConfig& c) {
        ++res.configs;
        const Trace tr = trace(c);
        if (!tr.valid) return;
        ++res.valid;
        res.z_loop += config_weight_with_paths(c, tr, w);
      },
      opt);
  res.z_vertex = contract(build_network(d, dict, VertexSource::Algebraic));
  res.rel = std::abs(res.z_loop - res.z_vertex) / std::max(std::abs(res.z_vertex), 1e-300);
  return res;
}

Report partition_equality(const Domain& d, const AngleDictionary& dict, double tol) {
  const PartitionResult p = partition_functions(d, dict);
  Report rep;
  rep.add("partition equality", std::string(model_name(d.model)) + " " + geometry_name(d.geom) + " " +
                                    std::to_string(d.L) + "x" + std::to_string(d.M),
          p.rel, tol);
  return rep;
}

}  // namespace qloop
