#include "qloop/loopmodel.hpp"

#include <cmath>
#include <numeric>

#include "qloop/errors.hpp"

namespace qloop {

namespace {

struct TileEntry {
  TileKind kind;
  const char* name;
  TileSpec spec;
};

const std::vector<TileEntry>& tile_table() {
  // Bulk slots: 0 left, 1 bottom, 2 top, 3 right.
  static const std::vector<TileEntry> t = {
      {TileKind::A, "A", {{{0, 2}, {1, 3}}, {}, false}},
      {TileKind::B, "B", {{{0, 1}, {2, 3}}, {}, false}},
      {TileKind::T, "T", {{}, {0, 1, 2, 3}, false}},
      {TileKind::U1a, "U1a", {{{0, 2}}, {1, 3}, false}},
      {TileKind::U1b, "U1b", {{{1, 3}}, {0, 2}, false}},
      {TileKind::U2a, "U2a", {{{0, 1}}, {2, 3}, false}},
      {TileKind::U2b, "U2b", {{{2, 3}}, {0, 1}, false}},
      {TileKind::Va, "Va", {{{1, 2}}, {0, 3}, false}},
      {TileKind::Vb, "Vb", {{{0, 3}}, {1, 2}, false}},
      {TileKind::W1, "W1", {{{0, 2}, {1, 3}}, {}, false}},
      {TileKind::W2, "W2", {{{0, 1}, {2, 3}}, {}, false}},
      {TileKind::BoundaryArc, "BoundaryArc", {{{0, 1}}, {}, false}},
      {TileKind::BoundaryEmpty, "BoundaryEmpty", {{}, {0, 1}, false}},
      {TileKind::KArc, "KArc", {{{0, 1}}, {}, false}},
      {TileKind::KEmpty, "KEmpty", {{}, {0, 1}, false}},
      {TileKind::DefectOn, "DefectOn", {{}, {}, true}},
      {TileKind::DefectOff, "DefectOff", {{}, {0}, false}},
  };
  return t;
}

}  // namespace

const char* tile_name(TileKind k) { return tile_table()[static_cast<int>(k)].name; }

std::optional<TileKind> tile_from_name(const std::string& s) {
  for (const auto& e : tile_table())
    if (s == e.name) return e.kind;
  return std::nullopt;
}

const TileSpec& tile_spec(TileKind k) { return tile_table()[static_cast<int>(k)].spec; }

const std::vector<TileKind>& tile_options(Model m, CellKind c) {
  static const std::vector<TileKind> dense_bulk = {TileKind::A, TileKind::B};
  static const std::vector<TileKind> dilute_bulk = {TileKind::T,  TileKind::U1a, TileKind::U1b,
                                                    TileKind::U2a, TileKind::U2b, TileKind::Va,
                                                    TileKind::Vb, TileKind::W1,  TileKind::W2};
  static const std::vector<TileKind> dense_arc = {TileKind::BoundaryArc};
  static const std::vector<TileKind> dilute_arc = {TileKind::BoundaryArc, TileKind::BoundaryEmpty};
  static const std::vector<TileKind> dense_k = {TileKind::KArc};
  static const std::vector<TileKind> dilute_k = {TileKind::KEmpty, TileKind::KArc};
  static const std::vector<TileKind> dense_defect = {TileKind::DefectOn};
  static const std::vector<TileKind> dilute_defect = {TileKind::DefectOn, TileKind::DefectOff};
  static const std::vector<TileKind> empty = {TileKind::DefectOff};
  const bool dense = m == Model::Dense;
  switch (c) {
    case CellKind::Bulk: return dense ? dense_bulk : dilute_bulk;
    case CellKind::Arc: return dense ? dense_arc : dilute_arc;
    case CellKind::KLeft:
    case CellKind::KRight: return dense ? dense_k : dilute_k;
    case CellKind::Defect: return dense ? dense_defect : dilute_defect;
    case CellKind::Empty: return empty;
  }
  return empty;
}

std::array<cplx, 6> dilute_weight_formulas(cplx q, cplx x) {
  const cplx q2 = q * q, q3 = q2 * q;
  const cplx s = q2 - 1.0 / q2;
  const cplx A = q3 * x + 1.0 / (q3 * x);
  const cplx xm = x - 1.0 / x;
  return {xm * A + s * (q3 + 1.0 / q3), s * A, kI * s * xm, xm * A, (q2 * x - 1.0 / (q2 * x)) * A,
          xm * (q * x + 1.0 / (q * x))};
}

LoopWeights LoopWeights::dense(double nu, cplx q, cplx x) {
  LoopWeights w;
  w.model = Model::Dense;
  w.nu = nu;
  w.bulk[TileKind::A] = q * x - 1.0 / (q * x);
  w.bulk[TileKind::B] = x - 1.0 / x;
  return w;
}

LoopWeights LoopWeights::dilute(double nu, cplx q, cplx x) {
  LoopWeights w;
  w.model = Model::Dilute;
  w.nu = nu;
  const auto f = dilute_weight_formulas(q, x);
  w.bulk[TileKind::T] = f[0];
  w.bulk[TileKind::U1a] = w.bulk[TileKind::U1b] = f[1];
  w.bulk[TileKind::U2a] = w.bulk[TileKind::U2b] = f[2];
  w.bulk[TileKind::Va] = w.bulk[TileKind::Vb] = f[3];
  w.bulk[TileKind::W1] = f[4];
  w.bulk[TileKind::W2] = f[5];
  return w;
}

cplx LoopWeights::tile_weight(const Cell& c, TileKind k) const {
  switch (c.kind) {
    case CellKind::Bulk: return bulk.at(k);
    case CellKind::KLeft:
      if (model == Model::Dense) return 1.0;
      return k == TileKind::KArc ? kappa_left : rho_left;
    case CellKind::KRight:
      if (model == Model::Dense) return 1.0;
      return k == TileKind::KArc ? kappa_right : rho_right;
    default: return 1.0;
  }
}

cplx dense_tau(cplx q) { return -(q + 1.0 / q); }
cplx dilute_tau(cplx q) { return -(std::pow(q, 4) + std::pow(q, -4)); }

cplx tau_boundary_reference(double nu, cplx xi, int n) {
  const cplx a = nu * (2 * kPi - static_cast<double>(n) * xi);
  return -(std::exp(kI * a) + std::exp(-kI * a));
}

cplx tau_boundary(double nu, cplx xi, int n) {
  const cplx a = nu * (2 * kPi - static_cast<double>(n) * xi);
  return std::exp(kI * a) + std::exp(-kI * a);
}

std::vector<std::string> LoopConfig::names() const {
  std::vector<std::string> out;
  for (TileKind k : tiles) out.emplace_back(tile_name(k));
  return out;
}

namespace {

// Partner slot of `slot` in the tile, or -1 (empty / terminal).
int partner_slot(TileKind k, int slot) {
  for (const auto& [i, j] : tile_spec(k).arcs) {
    if (i == slot) return j;
    if (j == slot) return i;
  }
  return -1;
}

bool occupies(TileKind k, int slot) {
  const TileSpec& s = tile_spec(k);
  if (s.terminal) return true;
  return partner_slot(k, slot) >= 0;
}

int slot_of(const Cell& c, int edge) {
  for (std::size_t i = 0; i < c.slots.size(); ++i)
    if (c.slots[i].edge == edge) return static_cast<int>(i);
  return -1;
}

bool edge_occupied_by(const Domain& d, const LoopConfig& cfg, int edge, int cell) {
  return occupies(cfg.tiles[cell], slot_of(d.cells[cell], edge));
}

bool has_deficit(const Domain& d, const Cell& c, TileKind k) {
  return d.model == Model::Dense && k == TileKind::KArc && (c.kind == CellKind::KLeft || c.kind == CellKind::KRight);
}

void add_turn(Turn& t, const Domain& d, const Cell& c, TileKind k, int i, int j) {
  const double g = slot_turn(d, c, i, j);
  t.geo += g;
  if (c.kind == CellKind::KLeft || c.kind == CellKind::KRight) ++t.contacts;
  if (has_deficit(d, c, k)) t.deficit += (g > 0) - (g < 0);
}

}  // namespace

Trace trace(const LoopConfig& cfg, int cut) {
  const Domain& d = *cfg.domain;
  Trace tr;
  const int E = static_cast<int>(d.edges.size());
  std::vector<char> occ_p(E), occ_c(E);
  for (int e = 0; e < E; ++e) {
    occ_p[e] = edge_occupied_by(d, cfg, e, d.edge_cells[e].first);
    occ_c[e] = edge_occupied_by(d, cfg, e, d.edge_cells[e].second);
    if (e == cut) {
      if (occ_p[e] == occ_c[e]) return tr;
    } else if (occ_p[e] != occ_c[e]) {
      return tr;
    }
  }
  tr.valid = true;
  std::vector<char> seen(E, 0);
  for (int e = 0; e < E; ++e) tr.occupied_edges += (occ_p[e] || occ_c[e]);

  // Walk out of cell `from` across `edge`; returns when a terminal or the cut
  // is reached, or the strand closes on `stop_edge`.
  auto walk = [&](int from, int edge, int stop_edge, OpenPath& path, Turn& acc) {
    for (;;) {
      seen[edge] = 1;
      path.steps.push_back({edge, acc});
      const auto& pc = d.edge_cells[edge];
      const int to = pc.first == from ? pc.second : pc.first;
      if (edge == cut) {
        path.ends_at_cut = true;
        return;
      }
      const TileKind k = cfg.tiles[to];
      if (tile_spec(k).terminal) return;
      const Cell& c = d.cells[to];
      const int i = slot_of(c, edge);
      const int j = partner_slot(k, i);
      if (j < 0) throw BrokenPath("strand enters a cell without continuation at " + edge_label(d.edges[edge]));
      add_turn(acc, d, c, k, i, j);
      from = to;
      edge = c.slots[j].edge;
      if (edge == stop_edge) return;
      if (seen[edge]) throw BrokenPath("strand revisits " + edge_label(d.edges[edge]));
    }
  };

  auto start_path = [&](int from_cell, int edge) {
    OpenPath p;
    Turn acc;
    walk(from_cell, edge, -1, p, acc);
    p.total = acc;
    tr.paths.push_back(std::move(p));
  };

  // Paths from the defects, in the domain's order.
  for (int e : d.defects) {
    if (seen[e]) continue;
    const auto& pc = d.edge_cells[e];
    const int term = d.cells[pc.first].kind == CellKind::Defect ? pc.first : pc.second;
    if (cfg.tiles[term] != TileKind::DefectOn) continue;
    start_path(term, e);
  }
  if (cut >= 0 && !seen[cut]) {
    const auto& pc = d.edge_cells[cut];
    // Start on the unoccupied side so that the walk enters the occupied cell.
    const int from = occ_p[cut] ? pc.second : pc.first;
    OpenPath p;
    Turn acc;
    seen[cut] = 1;
    p.steps.push_back({cut, acc});
    const int to = from == pc.first ? pc.second : pc.first;
    const Cell& c = d.cells[to];
    const TileKind k = cfg.tiles[to];
    if (!tile_spec(k).terminal) {
      const int i = slot_of(c, cut);
      const int j = partner_slot(k, i);
      add_turn(acc, d, c, k, i, j);
      walk(to, c.slots[j].edge, -1, p, acc);
    }
    p.total = acc;
    tr.paths.push_back(std::move(p));
  }
  for (int e = 0; e < E; ++e) {
    if (seen[e] || !occ_p[e]) continue;
    OpenPath p;
    Turn acc;
    // Closed loop: leave the producer cell across e and come back to e.
    walk(d.edge_cells[e].first, e, e, p, acc);
    if (p.ends_at_cut) throw BrokenPath("closed strand reached the cut");
    tr.loops.push_back(acc);
  }
  return tr;
}

int count_loops_union_find(const LoopConfig& cfg, int cut) {
  const Domain& d = *cfg.domain;
  const int E = static_cast<int>(d.edges.size());
  std::vector<int> parent(E);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); };
  std::vector<char> occ(E, 0), open(E, 0);
  for (std::size_t ci = 0; ci < d.cells.size(); ++ci) {
    const Cell& c = d.cells[ci];
    const TileKind k = cfg.tiles[ci];
    for (const auto& [i, j] : tile_spec(k).arcs) {
      const int a = c.slots[i].edge, b = c.slots[j].edge;
      occ[a] = occ[b] = 1;
      parent[find(a)] = find(b);
    }
    if (tile_spec(k).terminal) open[c.slots[0].edge] = 1;
  }
  if (cut >= 0) open[cut] = 1;
  std::vector<char> root_open(E, 0), root_seen(E, 0);
  for (int e = 0; e < E; ++e)
    if (occ[e] && open[e]) root_open[find(e)] = 1;
  int loops = 0;
  for (int e = 0; e < E; ++e) {
    if (!occ[e]) continue;
    const int r = find(e);
    if (root_seen[r]) continue;
    root_seen[r] = 1;
    loops += !root_open[r];
  }
  return loops;
}

std::size_t config_count(const Domain& d) {
  std::size_t n = 1;
  for (const auto& c : d.cells) {
    const std::size_t k = tile_options(d.model, c.kind).size();
    if (n > (std::size_t{1} << 62) / k) return SIZE_MAX;
    n *= k;
  }
  return n;
}

void enumerate_configs(const Domain& d, const std::function<void(const LoopConfig&)>& f, const EnumOptions& opt) {
  const int bulk = d.bulk_count();
  const int cap = d.model == Model::Dense ? opt.max_bulk_dense : opt.max_bulk_dilute;
  if (bulk > cap) throw CapacityExceeded(std::to_string(bulk) + " plaquettes exceed the enumeration cap " + std::to_string(cap));
  const std::size_t total = config_count(d);
  if (total > opt.max_configs) throw CapacityExceeded(std::to_string(total) + " configurations");
  const std::size_t n = d.cells.size();
  std::vector<const std::vector<TileKind>*> opts(n);
  for (std::size_t i = 0; i < n; ++i) opts[i] = &tile_options(d.model, d.cells[i].kind);
  std::vector<std::size_t> idx(n, 0);
  LoopConfig cfg;
  cfg.domain = &d;
  cfg.tiles.resize(n);
  for (std::size_t count = 0; count < total; ++count) {
    for (std::size_t i = 0; i < n; ++i) cfg.tiles[i] = (*opts[i])[idx[i]];
    f(cfg);
    for (std::size_t i = n; i-- > 0;) {
      if (++idx[i] < opts[i]->size()) break;
      idx[i] = 0;
    }
  }
}

namespace {

cplx orientation_sum(double nu, cplx theta) { return std::exp(kI * nu * theta) + std::exp(-kI * nu * theta); }

}  // namespace

cplx config_weight(const LoopConfig& c, const Trace& tr, const LoopWeights& w) {
  cplx out = 1.0;
  for (std::size_t i = 0; i < c.tiles.size(); ++i) out *= w.tile_weight(c.domain->cells[i], c.tiles[i]);
  for (const Turn& t : tr.loops) out *= orientation_sum(w.nu, t.value(w.xi));
  return out;
}

cplx config_weight_with_paths(const LoopConfig& c, const Trace& tr, const LoopWeights& w) {
  cplx out = config_weight(c, tr, w);
  for (const auto& p : tr.paths) out *= orientation_sum(w.nu, p.total.value(w.xi));
  return out;
}

PathGeometry winding(const LoopConfig& c, const Trace& tr, int edge) {
  const Domain& d = *c.domain;
  for (const auto& p : tr.paths)
    for (const auto& s : p.steps) {
      if (s.edge != edge) continue;
      PathGeometry g;
      g.theta = s.at.geo;
      const bool slanted = d.edges[edge].kind == EdgeKind::Slanted;
      g.n_contacts = s.at.contacts - (p.total.contacts - s.at.contacts);
      g.turn = s.at;
      const int e0 = p.steps.front().edge;
      const auto& pc = d.edge_cells[e0];
      const bool from_producer = d.cells[pc.first].kind == CellKind::Defect;
      g.start_offset = d.edges[e0].up_heading + (from_producer ? 0.0 : kPi) - kPi / 2;
      // Absolute heading is k pi on horizontal sides, k pi - alpha on slanted ones.
      g.k = static_cast<int>(std::lround((g.theta + g.start_offset + (slanted ? d.alpha : 0.0)) / kPi));
      return g;
    }
  throw EdgeNotOnPath("edge " + edge_label(d.edges[edge]) + " is not on an open path");
}

}  // namespace qloop
