#include "qloop/currents.hpp"

#include <algorithm>
#include <cmath>

#include "qloop/errors.hpp"

namespace qloop {

const char* obs_kind_name(ObsKind k) {
  switch (k) {
    case ObsKind::Phi0: return "phi0";
    case ObsKind::Phi1: return "phi1";
    case ObsKind::Phi0bar: return "phi0bar";
    case ObsKind::Phi1bar: return "phi1bar";
    case ObsKind::Psi: return "psi";
    case ObsKind::Xi: return "xi";
    case ObsKind::H: return "h";
  }
  return "?";
}

std::optional<ObsKind> obs_kind_from_name(const std::string& s) {
  for (ObsKind k : {ObsKind::Phi0, ObsKind::Phi1, ObsKind::Phi0bar, ObsKind::Phi1bar, ObsKind::Psi, ObsKind::Xi,
                    ObsKind::H})
    if (s == obs_kind_name(k)) return k;
  return std::nullopt;
}

const char* method_name(Method m) { return m == Method::LoopSum ? "loop_sum" : "vertex_contraction"; }

CurrentInsertion CurrentInsertion::generator(Gen g, int edge, TailKind tail) {
  return {gen_name(g), FormalSum{{1.0, {g}}}, edge, tail};
}

CurrentInsertion CurrentInsertion::composite(const std::string& label, const FormalSum& op, int edge, TailKind tail) {
  return {label, op, edge, tail};
}

Component component_of(const Domain& d, int edge) {
  return d.edges.at(edge).kind == EdgeKind::Horizontal ? Component::Time : Component::Space;
}

cplx ObservableField::at(int edge) const {
  auto it = values.find(edge);
  if (it == values.end()) throw MissingValue(std::string(obs_kind_name(kind)) + " has no value on edge " + std::to_string(edge));
  return it->second;
}

Gen observable_generator(ObsKind k) {
  switch (k) {
    case ObsKind::Phi0: return Gen::E0;
    case ObsKind::Phi1: return Gen::E1;
    case ObsKind::Phi0bar: return Gen::Ebar0;
    case ObsKind::Phi1bar: return Gen::Ebar1;
    default: break;
  }
  throw ModelUnsupported(std::string(obs_kind_name(k)) + " is not a single-generator observable");
}

namespace {

// Per-edge generator tables, cached on the network's dictionary.
struct SiteReps {
  GeneratorTable horizontal, slanted;
  CMatrix D, Dinv;
  const GeneratorTable& at(const Domain& d, int edge) const {
    return d.edges[edge].kind == EdgeKind::Horizontal ? horizontal : slanted;
  }
};

SiteReps site_reps(const VertexNetwork& net) {
  SiteReps s;
  s.horizontal = build_rep(net.dict.rep_w());
  s.slanted = build_rep(net.dict.rep_z());
  s.D = net.gauge;
  s.Dinv = net.gauge.inverse();
  return s;
}

CMatrix word_matrix(const GeneratorTable& t, const std::vector<Gen>& word) {
  return evaluate(FormalSum{{1.0, word}}, t);
}

CMatrix word_tail_inverse(const GeneratorTable& t, const std::vector<Gen>& word) {
  CMatrix m = CMatrix::Identity(t.dim, t.dim);
  for (Gen g : word) m = m * t[cartan_inv_of(g)];
  return m;
}

// Edges of the left tail of a grid insertion: sides with T (same slice, to the
// left) and the perimeter walk from the left end of the slice to a gap.
struct GridTail {
  std::vector<int> plain;     // T
  std::vector<int> inverse;   // T^-1 (perimeter sides whose up points inward)
};

bool up_points_inward(const Domain& d, int edge) {
  const CellKind k = d.cells[d.edge_cells[edge].first].kind;
  return k == CellKind::Arc || k == CellKind::Defect || k == CellKind::Empty;
}

GridTail grid_tail(const Domain& d, int edge) {
  GridTail tail;
  const Edge& e = d.edges[edge];
  int t = 0, xmax = 0;
  if (e.kind == EdgeKind::Horizontal) {
    t = (e.b2 - 1) / 2;
    xmax = e.a2 / 2 - 1;
  } else {
    t = e.b2 / 2;
    xmax = (e.a2 - 1) / 2;
  }
  for (int x = 1; x <= xmax; ++x) tail.plain.push_back(d.edge_at(2 * x, 2 * t + 1));
  const int P = static_cast<int>(d.perimeter.size());
  const int start = t >= 1 ? d.edges[d.edge_at(1, 2 * t)].perim : 0;
  for (int i = start, n = 0; n < P && !d.gap[i % P]; ++i, ++n) {
    const int side = d.perimeter[i % P];
    (up_points_inward(d, side) ? tail.inverse : tail.plain).push_back(side);
  }
  return tail;
}

void append_terms(std::vector<WeightedOps>& out, const VertexNetwork& net, const SiteReps& reps,
                  const CurrentInsertion& ins) {
  const Domain& d = *net.domain;
  if (ins.edge < 0 || ins.edge >= static_cast<int>(d.edges.size())) throw PositionOutOfRange("insertion edge");
  auto conj = [&](const CMatrix& m) -> CMatrix { return reps.D * m * reps.Dinv; };
  for (const Term& term : ins.op) {
    WeightedOps w;
    w.coeff = term.coeff;
    const GeneratorTable& here = reps.at(d, ins.edge);
    if (d.geom == Geometry::Grid) {
      if (ins.tail == TailKind::Right) throw TailObstruction("right tails are only defined on the light-cone lattice");
      const GridTail tail = grid_tail(d, ins.edge);
      for (int s : tail.inverse) w.ops.push_back({s, conj(word_tail_inverse(reps.at(d, s), term.word))});
      w.ops.push_back({ins.edge, conj(word_matrix(here, term.word))});
      for (int s : tail.plain) w.ops.push_back({s, conj(word_tail(reps.at(d, s), term.word))});
    } else {
      const Edge& e = d.edges[ins.edge];
      const int t = e.lc_t, x = e.lc_x;
      if (ins.tail == TailKind::Left) {
        for (int y = 1; y < x; ++y) {
          const int s = d.lc_edge(t, y);
          w.ops.push_back({s, conj(word_tail(reps.at(d, s), term.word))});
        }
        w.ops.push_back({ins.edge, conj(word_matrix(here, term.word))});
      } else {
        w.ops.push_back({ins.edge, conj(-word_tail_inverse(here, term.word) * word_matrix(here, term.word))});
        for (int y = x + 1; y <= d.L; ++y) {
          const int s = d.lc_edge(t, y);
          w.ops.push_back({s, conj(word_tail_inverse(reps.at(d, s), term.word))});
        }
      }
    }
    out.push_back(std::move(w));
  }
}

}  // namespace

std::vector<WeightedOps> insertion_terms(const VertexNetwork& net, const CurrentInsertion& ins) {
  std::vector<WeightedOps> out;
  append_terms(out, net, site_reps(net), ins);
  return out;
}

std::vector<WeightedOps> product_terms(const VertexNetwork& net, const std::vector<CurrentInsertion>& ins) {
  const SiteReps reps = site_reps(net);
  std::vector<WeightedOps> acc{WeightedOps{}};
  for (auto it = ins.rbegin(); it != ins.rend(); ++it) {
    std::vector<WeightedOps> one;
    append_terms(one, net, reps, *it);
    std::vector<WeightedOps> next;
    for (const auto& a : acc)
      for (const auto& b : one) {
        WeightedOps w;
        w.coeff = a.coeff * b.coeff;
        w.ops = a.ops;
        w.ops.insert(w.ops.end(), b.ops.begin(), b.ops.end());
        next.push_back(std::move(w));
      }
    acc = std::move(next);
  }
  return acc;
}

cplx expect_vertex(const VertexNetwork& net, const std::vector<CurrentInsertion>& ins) {
  const cplx Z = contract(net);
  if (ins.empty()) return 1.0;
  cplx num = 0.0;
  for (const auto& w : product_terms(net, ins)) num += w.coeff * contract(net, w.ops);
  return num / Z;
}

cplx expect_vertex(const Domain& d, const AngleDictionary& dict, const std::vector<CurrentInsertion>& ins) {
  return expect_vertex(build_network(d, dict, VertexSource::Algebraic), ins);
}

const std::vector<NormalizationEntry>& normalization_table() {
  using M = Model;
  using K = ObsKind;
  using E = EdgeKind;
  using G = Geometry;
  // o = 1 on horizontal sides, e^{i alpha} on slanted ones; conjugate for bar kinds.
  static const std::vector<NormalizationEntry> t = {
      {M::Dense, K::Phi0, E::Horizontal, G::Grid, "w^-1 e^{-i nu pi}"},
      {M::Dense, K::Phi0, E::Slanted, G::Grid, "w^-1 e^{-i nu pi} e^{i alpha}"},
      {M::Dense, K::Phi1, E::Horizontal, G::Grid, "w^-1 e^{i nu pi}"},
      {M::Dense, K::Phi1, E::Slanted, G::Grid, "w^-1 e^{i nu pi} e^{i alpha}"},
      {M::Dense, K::Phi0bar, E::Horizontal, G::Grid, "w e^{i nu pi}"},
      {M::Dense, K::Phi0bar, E::Slanted, G::Grid, "w e^{i nu pi} e^{-i alpha}"},
      {M::Dense, K::Phi1bar, E::Horizontal, G::Grid, "w e^{-i nu pi}"},
      {M::Dense, K::Phi1bar, E::Slanted, G::Grid, "w e^{-i nu pi} e^{-i alpha}"},
      {M::Dilute, K::Phi0, E::Horizontal, G::Grid, "-i phi(q)^-1 w^{l-1}"},
      {M::Dilute, K::Phi0, E::Slanted, G::Grid, "-i phi(q)^-1 w^{l-1} e^{i alpha}"},
      {M::Dilute, K::Phi0bar, E::Horizontal, G::Grid, "-i phi(q)^-1 w^{1-l}"},
      {M::Dilute, K::Phi0bar, E::Slanted, G::Grid, "-i phi(q)^-1 w^{1-l} e^{-i alpha}"},
      {M::Dilute, K::Phi1, E::Horizontal, G::Grid, "w^{-2l} e^{i nu pi}"},
      {M::Dilute, K::Phi1, E::Slanted, G::Grid, "w^{-2l} e^{i nu pi} e^{i alpha}"},
      {M::Dilute, K::Phi1bar, E::Horizontal, G::Grid, "w^{2l} e^{-i nu pi}"},
      {M::Dilute, K::Phi1bar, E::Slanted, G::Grid, "w^{2l} e^{-i nu pi} e^{-i alpha}"},
      {M::Dense, K::Phi0, E::Horizontal, G::LightCone, "z^2 e^{-i nu pi}"},
      {M::Dense, K::Phi0, E::Slanted, G::LightCone, "z^2 e^{-i nu pi} e^{i alpha}"},
      {M::Dense, K::Phi1, E::Horizontal, G::LightCone, "e^{i nu pi}"},
      {M::Dense, K::Phi1, E::Slanted, G::LightCone, "e^{i nu pi} e^{i alpha}"},
      {M::Dense, K::Phi0bar, E::Horizontal, G::LightCone, "z^-2 e^{i nu pi}"},
      {M::Dense, K::Phi0bar, E::Slanted, G::LightCone, "z^-2 e^{i nu pi} e^{-i alpha}"},
      {M::Dense, K::Phi1bar, E::Horizontal, G::LightCone, "e^{-i nu pi}"},
      {M::Dense, K::Phi1bar, E::Slanted, G::LightCone, "e^{-i nu pi} e^{-i alpha}"},
      {M::Dilute, K::Phi0, E::Horizontal, G::LightCone, "-i phi(q)^-1 z^{1-l}"},
      {M::Dilute, K::Phi0, E::Slanted, G::LightCone, "-i phi(q)^-1 z^{1-l} e^{i alpha}"},
      {M::Dilute, K::Phi0bar, E::Horizontal, G::LightCone, "-i phi(q)^-1 z^{l-1}"},
      {M::Dilute, K::Phi0bar, E::Slanted, G::LightCone, "-i phi(q)^-1 z^{l-1} e^{-i alpha}"},
      {M::Dilute, K::Phi1, E::Horizontal, G::LightCone, "e^{i nu pi}"},
      {M::Dilute, K::Phi1, E::Slanted, G::LightCone, "e^{i nu pi} e^{i alpha}"},
      {M::Dilute, K::Phi1bar, E::Horizontal, G::LightCone, "e^{-i nu pi}"},
      {M::Dilute, K::Phi1bar, E::Slanted, G::LightCone, "e^{-i nu pi} e^{-i alpha}"},
  };
  return t;
}

cplx normalization(const AngleDictionary& dict, ObsKind k, EdgeKind orientation, Geometry g) {
  const bool bar = k == ObsKind::Phi0bar || k == ObsKind::Phi1bar;
  const bool zero = k == ObsKind::Phi0 || k == ObsKind::Phi0bar;
  if (!zero && k != ObsKind::Phi1 && k != ObsKind::Phi1bar)
    throw ModelUnsupported(std::string("no normalization for ") + obs_kind_name(k));
  const double sb = bar ? -1.0 : 1.0;
  const cplx o = orientation == EdgeKind::Slanted ? std::exp(sb * kI * dict.alpha) : cplx(1.0);
  const double nu = dict.nu, l = dict.ell;
  const cplx epi = std::exp(kI * nu * kPi);
  // Light-cone sides carry w = 1/z, so both geometries are written in log w.
  const cplx lw = dict.logw;
  cplx base;
  if (dict.model == Model::Dense) {
    if (g == Geometry::Grid)
      base = zero ? std::exp(-sb * lw) / (bar ? 1.0 / epi : epi) : std::exp(-sb * lw) * (bar ? 1.0 / epi : epi);
    else
      base = zero ? std::exp(-2.0 * sb * lw) / (bar ? 1.0 / epi : epi) : (bar ? 1.0 / epi : epi);
  } else {
    const cplx phq = std::sqrt(dict.q + 1.0 / dict.q);
    if (zero)
      base = -kI / phq * std::exp(sb * (l - 1.0) * lw);
    else
      base = (g == Geometry::Grid ? std::exp(-sb * 2.0 * l * lw) : cplx(1.0)) * (bar ? 1.0 / epi : epi);
  }
  return base * o;
}

ObservableField vertex_field(const VertexNetwork& net, ObsKind k, const std::vector<int>& edges) {
  const Domain& d = *net.domain;
  ObservableField f;
  f.model = d.model;
  f.geom = d.geom;
  f.kind = k;
  f.method = Method::VertexContraction;
  const Gen g = observable_generator(k);
  std::vector<int> es = edges;
  if (es.empty())
    for (const Edge& e : d.edges) es.push_back(e.id);
  for (int e : es)
    f.values[e] = normalization(net.dict, k, d.edges[e].kind, d.geom) *
                  expect_vertex(net, {CurrentInsertion::generator(g, e)});
  return f;
}

cplx loop_phase(const AngleDictionary& dict, ObsKind k, const PathGeometry& g, PhaseConvention pc) {
  const double nu = dict.nu;
  const double th = g.theta;
  const cplx nx = static_cast<double>(g.n_contacts) * nu * dict.xi;
  if (dict.model == Model::Dense) {
    switch (k) {
      case ObsKind::Phi0: return std::exp(kI * ((4 * nu - 1) * th + nx));
      case ObsKind::Phi0bar: return std::exp(-kI * ((4 * nu - 1) * th + nx));
      case ObsKind::Phi1: return std::exp(-kI * (th + nx));
      case ObsKind::Phi1bar: return std::exp(kI * (th + nx));
      default: break;
    }
  } else {
    const double s = 1.5 * nu - 0.25;
    const bool consistent = pc == PhaseConvention::Consistent;
    const double sign = (consistent && (g.k % 2)) ? -1.0 : 1.0;
    // The tail part of the phase sees the absolute heading, the orientation
    // part only the turning from the start.
    const double off = consistent ? (s - nu) * g.start_offset : 0.0;
    switch (k) {
      case ObsKind::Phi0: return sign * std::exp(kI * (s * th + off));
      case ObsKind::Phi0bar: return sign * std::exp(-kI * (s * th + off));
      case ObsKind::Phi1: return std::exp(-kI * th);
      case ObsKind::Phi1bar: return std::exp(kI * th);
      default: break;
    }
  }
  throw ModelUnsupported(std::string("loop phase of ") + obs_kind_name(k));
}

namespace {

// Dilute E0-type observables end the path on the marked edge.
bool ends_at_mark(Model m, ObsKind k) { return m == Model::Dilute && (k == ObsKind::Phi0 || k == ObsKind::Phi0bar); }

}  // namespace

std::map<ObsKind, ObservableField> loop_fields(const Domain& d, const AngleDictionary& dict,
                                               const std::vector<ObsKind>& kinds, const EnumOptions& opt,
                                               PhaseConvention pc) {
  const LoopWeights w = dict.loop_weights();
  const int E = static_cast<int>(d.edges.size());
  std::map<ObsKind, std::vector<cplx>> num;
  bool want_cut = false, want_through = false;
  for (ObsKind k : kinds) {
    observable_generator(k);
    num[k].assign(E, 0.0);
    (ends_at_mark(d.model, k) ? want_cut : want_through) = true;
  }
  cplx Z = 0.0;
  std::vector<int> mismatched;
  enumerate_configs(
      d,
      [&](const LoopConfig& c) {
        const Trace tr = trace(c);
        if (tr.valid) {
          Z += config_weight_with_paths(c, tr, w);
          if (!want_through || tr.paths.empty()) return;
          const cplx W = config_weight(c, tr, w);
          for (const PathStep& s : tr.paths.front().steps) {
            const PathGeometry g = winding(c, tr, s.edge);
            for (ObsKind k : kinds)
              if (!ends_at_mark(d.model, k)) num[k][s.edge] += W * loop_phase(dict, k, g, pc);
          }
          return;
        }
        if (!want_cut) return;
        // A single mismatched edge can be the endpoint of the open path.
        int cut = -1, n = 0;
        for (int e = 0; e < E; ++e) {
          const auto& pc = d.edge_cells[e];
          const bool a = tile_spec(c.tiles[pc.first]).terminal || [&] {
            for (const auto& [i, j] : tile_spec(c.tiles[pc.first]).arcs)
              if (d.cells[pc.first].slots[i].edge == e || d.cells[pc.first].slots[j].edge == e) return true;
            return false;
          }();
          const bool b = tile_spec(c.tiles[pc.second]).terminal || [&] {
            for (const auto& [i, j] : tile_spec(c.tiles[pc.second]).arcs)
              if (d.cells[pc.second].slots[i].edge == e || d.cells[pc.second].slots[j].edge == e) return true;
            return false;
          }();
          if (a != b) {
            cut = e;
            if (++n > 1) return;
          }
        }
        if (n != 1) return;
        const Trace tc = trace(c, cut);
        if (!tc.valid || tc.paths.empty() || !tc.paths.front().ends_at_cut) return;
        const cplx W = config_weight(c, tc, w);
        const PathGeometry g = winding(c, tc, cut);
        for (ObsKind k : kinds)
          if (ends_at_mark(d.model, k)) num[k][cut] += W * loop_phase(dict, k, g, pc);
      },
      opt);
  std::map<ObsKind, ObservableField> out;
  for (ObsKind k : kinds) {
    ObservableField f;
    f.model = d.model;
    f.geom = d.geom;
    f.kind = k;
    f.method = Method::LoopSum;
    for (int e = 0; e < E; ++e) f.values[e] = num[k][e] / Z;
    out[k] = std::move(f);
  }
  return out;
}

cplx expect_loopsum(const Domain& d, const AngleDictionary& dict, ObsKind k, int edge, const EnumOptions& opt,
                    PhaseConvention pc) {
  return loop_fields(d, dict, {k}, opt, pc).at(k).at(edge);
}

cplx dh_residual(const Domain& d, const ObservableField& f, int cell) {
  if (cell < 0 || cell >= static_cast<int>(d.cells.size())) throw PositionOutOfRange("cell index");
  const Cell& c = d.cells[cell];
  if (c.kind != CellKind::Bulk) throw InconsistentParams("stencil needs a bulk cell");
  const bool bar = f.kind == ObsKind::Phi0bar || f.kind == ObsKind::Phi1bar;
  const cplx e = std::exp((bar ? -1.0 : 1.0) * kI * (kPi - d.alpha));
  const cplx left = f.at(c.slots[0].edge), bottom = f.at(c.slots[1].edge);
  const cplx top = f.at(c.slots[2].edge), right = f.at(c.slots[3].edge);
  return bottom + e * right - e * left - top;
}

double max_dh_residual(const Domain& d, const ObservableField& f) {
  double m = 0.0;
  for (int c : d.bulk_cells()) m = std::max(m, std::abs(dh_residual(d, f, c)));
  return m;
}

std::vector<int> left_boundary_slices(const Domain& d) {
  if (d.geom != Geometry::LightCone) throw InconsistentParams("boundary slices need a light-cone domain");
  std::vector<int> ts;
  for (const Cell& c : d.cells)
    if (c.kind == CellKind::KLeft) ts.push_back(d.edges[c.slots[0].edge].lc_t);
  std::sort(ts.begin(), ts.end());
  return ts;
}

namespace {

cplx orientation_factor(const Domain& d, int edge, double alpha) {
  return d.edges[edge].kind == EdgeKind::Slanted ? std::exp(kI * alpha) : cplx(1.0);
}

}  // namespace

std::map<int, CVector> dressed_defect_vectors(const Domain& d, const AngleDictionary& dict) {
  const CMatrix D = loop_gauge(d.model);
  std::map<int, CVector> out;
  for (int e : d.defects) {
    const double h = d.edges[e].up_heading;
    CVector v(d.dim());
    if (d.model == Model::Dense)
      v << std::exp(kI * dict.nu * h), std::exp(-kI * dict.nu * h);
    else
      v << std::exp(kI * dict.nu * h), 1.0, std::exp(-kI * dict.nu * h);
    out[e] = D * v;
  }
  return out;
}

ObservableField psi_field(const Domain& d, const AngleDictionary& dict, const EnumOptions& opt) {
  if (d.geom != Geometry::LightCone) throw InconsistentParams("psi lives on the light-cone boundary");
  ObservableField psi;
  psi.model = d.model;
  psi.geom = d.geom;
  psi.kind = ObsKind::Psi;
  std::vector<int> edges;
  for (int t = 0; t <= d.lc_T(); ++t) edges.push_back(d.lc_edge(t, 1));
  if (d.model == Model::Dense) {
    psi.method = Method::LoopSum;
    auto f = loop_fields(d, dict, {ObsKind::Phi0, ObsKind::Phi1}, opt);
    const cplx zi = 1.0 / dict.z();
    for (int e : edges) psi.values[e] = zi * (f[ObsKind::Phi1].at(e) + dict.r * f[ObsKind::Phi0].at(e));
    return psi;
  }
  psi.method = Method::VertexContraction;
  const VertexNetwork net = build_network(d, dict, VertexSource::Algebraic, dressed_defect_vectors(d, dict));
  const FormalSum P = dilute_P(dict.q);
  // z^{1-l} cancels the z^{l-1} carried by both xi and phi0.
  for (int e : edges) {
    const cplx p = expect_vertex(net, {CurrentInsertion::composite("P", P, e)});
    const cplx e0 = expect_vertex(net, {CurrentInsertion::generator(Gen::E0, e)});
    psi.values[e] = orientation_factor(d, e, dict.alpha) * (p - kI * dict.q * e0);
  }
  return psi;
}

double boundary_dh_residual(const Domain& d, const ObservableField& psi, int t) {
  const cplx e = std::exp(kI * (kPi - d.alpha));
  return std::real(psi.at(d.lc_edge(t, 1)) + e * psi.at(d.lc_edge(t + 1, 1)));
}

cplx conservation_residual(const VertexNetwork& net, const CurrentInsertion& proto, int cell) {
  const Domain& d = *net.domain;
  if (cell < 0 || cell >= static_cast<int>(d.cells.size())) throw PositionOutOfRange("cell index");
  const Cell& c = d.cells[cell];
  auto j = [&](int slot) {
    CurrentInsertion ins = proto;
    ins.edge = c.slots[slot].edge;
    return expect_vertex(net, {ins});
  };
  switch (c.kind) {
    case CellKind::Bulk: return j(0) + j(1) - j(2) - j(3);
    case CellKind::KLeft: return j(0) - j(1);
    default: throw InconsistentParams("conservation is checked on bulk and K_left cells");
  }
}

namespace {

// Exponent of q in the T1 eigenvalue of each basis state.
std::vector<int> t1_weights(Model m) {
  return m == Model::Dense ? std::vector<int>{1, -1} : std::vector<int>{4, 0, -4};
}

}  // namespace

double local_flux_violation(const VertexNetwork& net, int cell) {
  const Domain& d = *net.domain;
  const Cell& c = d.cells.at(cell);
  const Tensor& t = net.tensors.at(cell);
  const std::vector<int> h = t1_weights(d.model);
  const int n = static_cast<int>(c.slots.size());
  double scale = 0.0;
  for (const cplx& v : t.data) scale = std::max(scale, std::abs(v));
  double worst = 0.0;
  for (std::size_t idx = 0; idx < t.data.size(); ++idx) {
    if (std::abs(t.data[idx]) <= 1e-12 * scale) continue;
    std::size_t rem = idx;
    int flux = 0;
    for (int s = n - 1; s >= 0; --s) {
      const int state = static_cast<int>(rem % t.dims[s]);
      rem /= t.dims[s];
      // Up is the arrow direction: it enters the cell or leaves it.
      flux += c.slots[s].up_enters ? h[state] : -h[state];
    }
    worst = std::max(worst, static_cast<double>(std::abs(flux)));
  }
  return worst;
}

namespace {

CMatrix k_cell_matrix(const Tensor& t, int dim) {
  CMatrix K(dim, dim);
  for (int s0 = 0; s0 < dim; ++s0)
    for (int s1 = 0; s1 < dim; ++s1) K(s1, s0) = t.data[s0 * dim + s1];
  return K;
}

// Operator from slice t to slice t + 1 of a light-cone network.
CMatrix lc_layer(const VertexNetwork& net, int t) {
  const Domain& d = *net.domain;
  const int dim = d.dim();
  std::vector<std::pair<int, CMatrix>> blocks;  // first site, operator
  for (std::size_t ci = 0; ci < d.cells.size(); ++ci) {
    const Cell& c = d.cells[ci];
    if (c.kind != CellKind::Bulk && c.kind != CellKind::KLeft && c.kind != CellKind::KRight) continue;
    const Edge& in0 = d.edges[c.slots[0].edge];
    if (in0.lc_t != t) continue;
    if (c.kind == CellKind::Bulk)
      blocks.emplace_back(in0.lc_x, slots_to_rcheck(net.tensors[ci].data, dim));
    else
      blocks.emplace_back(in0.lc_x, k_cell_matrix(net.tensors[ci], dim));
  }
  std::sort(blocks.begin(), blocks.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<CMatrix> ops;
  for (auto& b : blocks) ops.push_back(std::move(b.second));
  return kron_all(ops);
}

std::vector<GeneratorTable> lc_slice_reps(const AngleDictionary& dict, int L, int t) {
  const GeneratorTable gz = build_rep(dict.rep_z()), gw = build_rep(dict.rep_w());
  std::vector<GeneratorTable> sites;
  for (int x = 1; x <= L; ++x) sites.push_back((x + t) % 2 == 0 ? gz : gw);
  return sites;
}

CMatrix gauge_power(const CMatrix& D, int L) { return kron_all(std::vector<CMatrix>(L, D)); }

}  // namespace

CMatrix double_row_transfer(const AngleDictionary& dict, int L) {
  const Domain d = light_cone(dict.model, L, 1, dict.alpha, 0);
  const VertexNetwork net = build_network(d, dict, VertexSource::Algebraic);
  return lc_layer(net, 1) * lc_layer(net, 0);
}

ChargeResult charge_commutation(const AngleDictionary& dict, int L, const FormalSum& X) {
  const CMatrix T2 = double_row_transfer(dict, L);
  const CMatrix G = gauge_power(loop_gauge(dict.model), L);
  const CMatrix Q = G * charge(lc_slice_reps(dict, L, 0), X) * G.inverse();
  ChargeResult r;
  r.norm = max_abs(CMatrix(Q * T2 - T2 * Q));
  r.t2_norm = max_abs(T2);
  return r;
}

cplx adjoint_constant_reference(const AngleDictionary& dict) {
  const cplx z2l = std::exp(2.0 * dict.ell * dict.logz);
  return -std::pow(dict.q, -4) * (z2l + 1.0 / z2l);
}

cplx adjoint_constant_dressed(const AngleDictionary& dict) {
  return -std::pow(dict.q, -4) * std::exp(kI * dict.nu * (dict.alpha - kPi));
}

AdjointResult adjoint_observable(const Domain& d, const AngleDictionary& dict, int edge) {
  if (d.model != Model::Dilute || d.geom != Geometry::LightCone || d.defects.size() != 2)
    throw InconsistentParams("adjoint observable needs a dilute light-cone domain with a defect pair");
  const VertexNetwork net = build_network(d, dict, VertexSource::Algebraic, dressed_defect_vectors(d, dict));
  const CurrentInsertion e0 = CurrentInsertion::generator(Gen::E0, edge);
  AdjointResult r;
  for (int def : d.defects)
    r.xi += expect_vertex(net, {e0, CurrentInsertion::generator(Gen::E1, def, TailKind::Right)});
  r.phi0 = expect_vertex(net, {e0});

  // ad_{Delta(E1)}[O] = Delta(E1) O - T O T^-1 Delta(E1), T = T1 on the whole slice.
  const Edge& e = d.edges[edge];
  const SiteReps reps = site_reps(net);
  auto conj = [&](const CMatrix& m) -> CMatrix { return reps.D * m * reps.Dinv; };
  std::vector<int> slice;
  for (int x = 1; x <= d.L; ++x) slice.push_back(d.lc_edge(e.lc_t, x));
  const auto o_terms = insertion_terms(net, e0);
  const cplx Z = contract(net);
  cplx direct = 0.0;
  for (int y = 1; y <= d.L; ++y) {
    const auto j_terms = insertion_terms(net, CurrentInsertion::generator(Gen::E1, slice[y - 1]));
    for (const auto& o : o_terms)
      for (const auto& j : j_terms) {
        OpProduct first = o.ops;  // E1 O: O acts first
        first.insert(first.end(), j.ops.begin(), j.ops.end());
        OpProduct second = j.ops;  // T O T^-1 E1
        for (int s : slice) second.push_back({s, conj(reps.at(d, s)[Gen::T1inv])});
        second.insert(second.end(), o.ops.begin(), o.ops.end());
        for (int s : slice) second.push_back({s, conj(reps.at(d, s)[Gen::T1])});
        direct += o.coeff * j.coeff * (contract(net, first) - contract(net, second));
      }
  }
  r.xi_direct = direct / Z;
  r.c_reference = adjoint_constant_reference(dict);
  r.c_dressed = adjoint_constant_dressed(dict);
  auto rel = [](cplx a, cplx b) { return std::abs(b) > 0.0 ? std::abs(a - b) / std::abs(b) : std::abs(a); };
  r.rel_direct = rel(r.xi_direct, r.xi);
  r.rel_reference = rel(r.xi, r.c_reference * r.phi0);
  r.rel_dressed = rel(r.xi, r.c_dressed * r.phi0);
  return r;
}

ContinuumData continuum_dimensions(double g, double n, int m, double alpha_bg) {
  if (!(g > 0.0)) throw NonPositiveCoupling("g = " + std::to_string(g));
  ContinuumData c;
  c.g = g;
  c.n = n;
  c.m = m;
  c.alpha_bg = alpha_bg;
  const double e = 2.0 * n + alpha_bg, a2 = alpha_bg * alpha_bg;
  c.h = ((e + m * g / 2.0) * (e + m * g / 2.0) - a2) / (4.0 * g);
  c.hbar = ((e - m * g / 2.0) * (e - m * g / 2.0) - a2) / (4.0 * g);
  return c;
}

double kac(double r, double s, double g) {
  if (!(g > 0.0)) throw NonPositiveCoupling("g = " + std::to_string(g));
  return ((r - g * s) * (r - g * s) - (1.0 - g) * (1.0 - g)) / (4.0 * g);
}

double coupling(Model m, double nu) {
  const double g = 1.0 - 2.0 * nu;
  const bool ok = m == Model::Dense ? (g > 0.0 && g < 1.0) : (g > 1.0 && g < 2.0);
  if (!ok) throw InconsistentParams("nu = " + std::to_string(nu) + " outside the critical range of the model");
  return g;
}

double background_charge(double g) { return 1.0 - g; }

namespace {

// Charges given as (2n + alpha); n is recovered from the background charge.
ContinuumData from_total(double g, double total, int m) {
  const double a = background_charge(g);
  return continuum_dimensions(g, (total - a) / 2.0, m, a);
}

}  // namespace

ContinuumData dense_phi0_dimensions(double nu) { return from_total(coupling(Model::Dense, nu), 4.0 * nu - 1.0, -2); }
ContinuumData dense_phi1_dimensions(double nu) { return from_total(coupling(Model::Dense, nu), 1.0, 2); }
ContinuumData dilute_phi0_dimensions(double nu) {
  return from_total(coupling(Model::Dilute, nu), 3.0 * nu - 0.5, -1);
}

}  // namespace qloop
