#include "qloop/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qloop/errors.hpp"

namespace qloop {

const char* geometry_name(Geometry g) { return g == Geometry::Grid ? "grid" : "lightcone"; }

const char* cell_kind_name(CellKind k) {
  switch (k) {
    case CellKind::Bulk: return "bulk";
    case CellKind::Arc: return "arc";
    case CellKind::KLeft: return "k_left";
    case CellKind::KRight: return "k_right";
    case CellKind::Defect: return "defect";
    case CellKind::Empty: return "empty";
  }
  return "?";
}

int Domain::edge_at(int a2, int b2) const {
  auto it = by_coord.find({a2, b2});
  return it == by_coord.end() ? -1 : it->second;
}

int Domain::lc_edge(int t, int x) const {
  if (geom != Geometry::LightCone) throw InconsistentParams("lc_edge on a grid domain");
  if (t < 0 || t > lc_T() || x < 1 || x > L) throw PositionOutOfRange("light-cone site out of range");
  return edge_at(x + t - 1, t - x);
}

int Domain::bulk_count() const {
  return static_cast<int>(std::count_if(cells.begin(), cells.end(), [](const Cell& c) { return c.kind == CellKind::Bulk; }));
}

std::vector<int> Domain::bulk_cells() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (cells[i].kind == CellKind::Bulk) out.push_back(static_cast<int>(i));
  return out;
}

std::string edge_label(const Edge& e) {
  std::ostringstream s;
  if (e.lc_t >= 0)
    s << "(x=" << e.lc_x << ",t=" << e.lc_t << ")";
  else
    s << "(" << e.x() << "," << e.t() << ")";
  return s.str();
}

namespace {

double wrap_pm_pi(double a) {
  a = std::fmod(a, 2 * kPi);
  if (a <= -kPi) a += 2 * kPi;
  if (a > kPi) a -= 2 * kPi;
  return a;
}

int add_edge(Domain& d, int a2, int b2) {
  if (int id = d.edge_at(a2, b2); id >= 0) return id;
  Edge e;
  e.id = static_cast<int>(d.edges.size());
  e.a2 = a2;
  e.b2 = b2;
  e.kind = (a2 % 2 == 0) ? EdgeKind::Horizontal : EdgeKind::Slanted;
  e.up_heading = e.kind == EdgeKind::Horizontal ? kPi / 2 : kPi / 2 - d.alpha;
  d.edges.push_back(e);
  d.by_coord[{a2, b2}] = e.id;
  return e.id;
}

Cell bulk_cell(Domain& d, int X2, int Y2) {
  Cell c;
  c.kind = CellKind::Bulk;
  c.X2 = X2;
  c.Y2 = Y2;
  c.slots = {{add_edge(d, X2 - 1, Y2), true},
             {add_edge(d, X2, Y2 - 1), true},
             {add_edge(d, X2, Y2 + 1), false},
             {add_edge(d, X2 + 1, Y2), false}};
  return c;
}

void finish(Domain& d) {
  d.edge_cells.assign(d.edges.size(), {-1, -1});
  for (std::size_t ci = 0; ci < d.cells.size(); ++ci)
    for (const Slot& s : d.cells[ci].slots) {
      auto& pc = d.edge_cells[s.edge];
      int& slot = s.up_enters ? pc.second : pc.first;
      if (slot >= 0) throw InconsistentParams("edge claimed twice on one side: " + edge_label(d.edges[s.edge]));
      slot = static_cast<int>(ci);
    }
  for (const auto& e : d.edges) {
    const auto& pc = d.edge_cells[e.id];
    if (pc.first < 0 || pc.second < 0) throw InconsistentParams("dangling edge " + edge_label(e));
  }
}

void check_common(Model, int L, int M, double alpha) {
  if (L < 1 || M < 0) throw InconsistentParams("domain size must be positive");
  if (!(alpha > 0.0 && alpha < kPi)) throw InconsistentParams("rhombus angle must lie in (0, pi)");
}

}  // namespace

double crossing_heading(const Domain& d, const Slot& s, bool into_cell) {
  const double h = d.edges[s.edge].up_heading;
  return s.up_enters == into_cell ? h : h + kPi;
}

double slot_turn(const Domain& d, const Cell& c, int i, int j) {
  if (c.explicit_turn) return i == 0 ? c.turn01 : -c.turn01;
  return wrap_pm_pi(crossing_heading(d, c.slots[j], false) - crossing_heading(d, c.slots[i], true));
}

Domain rhombic_grid(Model m, int L, int M, double alpha, std::vector<int> defect_x) {
  check_common(m, L, M, alpha);
  if (M < 1) throw InconsistentParams("grid needs at least one row");
  Domain d;
  d.model = m;
  d.geom = Geometry::Grid;
  d.L = L;
  d.M = M;
  d.alpha = alpha;
  for (int t = 1; t <= M; ++t)
    for (int x = 1; x <= L; ++x) d.cells.push_back(bulk_cell(d, 2 * x, 2 * t));

  for (int x = 1; x <= L; ++x) d.perimeter.push_back(d.edge_at(2 * x, 1));
  for (int t = 1; t <= M; ++t) d.perimeter.push_back(d.edge_at(2 * L + 1, 2 * t));
  for (int x = L; x >= 1; --x) d.perimeter.push_back(d.edge_at(2 * x, 2 * M + 1));
  for (int t = M; t >= 1; --t) d.perimeter.push_back(d.edge_at(1, 2 * t));
  const int P = static_cast<int>(d.perimeter.size());
  for (int i = 0; i < P; ++i) d.edges[d.perimeter[i]].perim = i;

  // Bottom and left sides have up pointing into the domain.
  auto inward_up = [&](int pi) { return pi < L || pi >= 2 * L + M; };

  std::sort(defect_x.begin(), defect_x.end());
  defect_x.erase(std::unique(defect_x.begin(), defect_x.end()), defect_x.end());
  std::vector<int> dpos;
  for (int x : defect_x) {
    if (x < 1 || x > L) throw PositionOutOfRange("defect position outside the bottom row");
    dpos.push_back(x - 1);
  }
  if (m == Model::Dense && dpos.size() % 2 != 0) throw InconsistentParams("dense domains need an even number of defects");
  if (dpos.size() > 2) throw InconsistentParams("at most two defects are supported");
  if (dpos.size() == 2 && dpos[1] != dpos[0] + 1) throw InconsistentParams("defects must be adjacent");

  std::vector<int> partner(P, -1);
  auto add_terminal = [&](int pi, CellKind kind) {
    Cell c;
    c.kind = kind;
    c.slots = {{d.perimeter[pi], !inward_up(pi)}};
    d.cells.push_back(c);
  };
  for (int pi : dpos) {
    add_terminal(pi, CellKind::Defect);
    d.defects.push_back(d.perimeter[pi]);
  }

  std::vector<std::vector<int>> segments;
  if (dpos.empty()) {
    segments.emplace_back();
    for (int i = 0; i < P; ++i) segments.back().push_back(i);
  } else {
    for (std::size_t k = 0; k < dpos.size(); ++k) {
      const int from = dpos[(k + dpos.size() - 1) % dpos.size()];
      const int to = dpos[k];
      segments.emplace_back();
      for (int i = (from + 1) % P; i != to; i = (i + 1) % P) segments.back().push_back(i);
    }
  }
  for (auto& seg : segments) {
    if (seg.size() % 2 != 0) {
      if (m == Model::Dense) throw InconsistentParams("odd boundary segment between defects");
      add_terminal(seg.back(), CellKind::Empty);
      seg.pop_back();
    }
    for (std::size_t k = 0; k + 1 < seg.size(); k += 2) {
      const int p1 = seg[k], p2 = seg[k + 1];
      partner[p1] = p2;
      partner[p2] = p1;
      Cell c;
      c.kind = CellKind::Arc;
      c.slots = {{d.perimeter[p1], !inward_up(p1)}, {d.perimeter[p2], !inward_up(p2)}};
      const Edge& e1 = d.edges[d.perimeter[p1]];
      const Edge& e2 = d.edges[d.perimeter[p2]];
      const double out1 = inward_up(p1) ? e1.up_heading + kPi : e1.up_heading;
      const double in2 = inward_up(p2) ? e2.up_heading : e2.up_heading + kPi;
      double turn = std::fmod(in2 - out1, 2 * kPi);
      if (turn <= 1e-12) turn += 2 * kPi;
      c.explicit_turn = true;
      c.turn01 = turn;
      d.cells.push_back(c);
    }
  }
  d.gap.assign(P, true);
  for (int i = 0; i < P; ++i) {
    const int prev = (i + P - 1) % P;
    if (partner[i] == prev) d.gap[i] = false;
  }
  finish(d);
  return d;
}

Domain light_cone(Model m, int L, int M, double alpha, int defect_pair) {
  check_common(m, L, M, alpha);
  if (L % 2 != 0 || L < 2) throw InconsistentParams("light-cone width must be even and >= 2");
  if (defect_pair < 0 || defect_pair > L / 2) throw PositionOutOfRange("defect pair index");
  Domain d;
  d.model = m;
  d.geom = Geometry::LightCone;
  d.L = L;
  d.M = M;
  d.alpha = alpha;
  const int T = 2 * M + 1;
  for (int t = 0; t <= T; ++t)
    for (int x = 1; x <= L; ++x) {
      const int id = add_edge(d, x + t - 1, t - x);
      d.edges[id].lc_t = t;
      d.edges[id].lc_x = x;
    }
  // Bottom arcs: top and right sides of the cell below sites (2k-1, 2k).
  for (int k = 1; k <= L / 2; ++k) {
    const int e1 = d.lc_edge(0, 2 * k - 1), e2 = d.lc_edge(0, 2 * k);
    if (k == defect_pair) {
      for (int e : {e1, e2}) {
        Cell c;
        c.kind = CellKind::Defect;
        c.slots = {{e, false}};
        d.cells.push_back(c);
        d.defects.push_back(e);
      }
      continue;
    }
    Cell c;
    c.kind = CellKind::Arc;
    c.X2 = 2 * k - 2;
    c.Y2 = -2 * k;
    c.slots = {{e1, false}, {e2, false}};
    d.cells.push_back(c);
  }
  for (int t = 0; t < T; ++t) {
    const int first = (t % 2 == 0) ? 2 : 1;
    if (t % 2 == 0) {
      Cell k;
      k.kind = CellKind::KLeft;
      k.X2 = t;
      k.Y2 = t;
      k.slots = {{d.lc_edge(t, 1), true}, {d.lc_edge(t + 1, 1), false}};
      d.cells.push_back(k);
    }
    for (int x = first; x + 1 <= L; x += 2) {
      Cell c;
      c.kind = CellKind::Bulk;
      c.X2 = x + t;
      c.Y2 = t - x;
      c.slots = {{d.lc_edge(t, x), true}, {d.lc_edge(t, x + 1), true}, {d.lc_edge(t + 1, x), false},
                 {d.lc_edge(t + 1, x + 1), false}};
      d.cells.push_back(c);
    }
    if (t % 2 == 0) {
      Cell k;
      k.kind = CellKind::KRight;
      k.X2 = L + t;
      k.Y2 = t - L;
      k.slots = {{d.lc_edge(t, L), true}, {d.lc_edge(t + 1, L), false}};
      d.cells.push_back(k);
    }
  }
  for (int k = 1; k <= L / 2; ++k) {
    Cell c;
    c.kind = CellKind::Arc;
    c.X2 = 2 * k - 1 + T;
    c.Y2 = T - 2 * k + 1;
    c.slots = {{d.lc_edge(T, 2 * k - 1), true}, {d.lc_edge(T, 2 * k), true}};
    d.cells.push_back(c);
  }
  finish(d);
  return d;
}

}  // namespace qloop
