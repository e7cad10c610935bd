#pragma once
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qloop/qalgebra.hpp"

namespace qloop {

// All domains are finite regions of one rhombic lattice. Coordinates are
// doubled: a face (cell) sits at even (X2, Y2); its sides are
// left (X2-1, Y2), bottom (X2, Y2-1), top (X2, Y2+1), right (X2+1, Y2).
// Bottom and top sides are horizontal; left and right sides are slanted.
// "Up" on a side is the direction from the bottom/left cell into the
// top/right cell: heading pi/2 on horizontal sides, pi/2 - alpha on slanted.

enum class Geometry { Grid, LightCone };
enum class EdgeKind { Horizontal, Slanted };

const char* geometry_name(Geometry g);

struct Edge {
  int id = -1;
  int a2 = 0, b2 = 0;
  EdgeKind kind = EdgeKind::Horizontal;
  double up_heading = 0.0;
  int perim = -1;  // grid: index in the counter-clockwise perimeter list
  int lc_t = -1, lc_x = -1;  // light-cone slice and site (1-based)
  double x() const { return a2 / 2.0; }
  double t() const { return b2 / 2.0; }
};

enum class CellKind { Bulk, Arc, KLeft, KRight, Defect, Empty };

const char* cell_kind_name(CellKind k);

struct Slot {
  int edge = -1;
  bool up_enters = true;  // the up direction of the side points into this cell
};

struct Cell {
  CellKind kind = CellKind::Bulk;
  int X2 = 0, Y2 = 0;
  // Bulk: [left, bottom, top, right]. KLeft: [bottom, right]. KRight:
  // [left, top]. Arc: two sides. Defect/Empty: one side.
  std::vector<Slot> slots;
  // Arcs of the grid perimeter go around the outside; their turn from slot 0
  // to slot 1 is stored explicitly. Half-cells use the geometric rule.
  bool explicit_turn = false;
  double turn01 = 0.0;
};

struct Domain {
  Model model = Model::Dense;
  Geometry geom = Geometry::Grid;
  int L = 0, M = 0;
  double alpha = 0.0;
  std::vector<Edge> edges;
  std::vector<Cell> cells;
  std::vector<int> defects;  // edge ids; the first one starts the open path
  // For each edge: {producer cell, consumer cell} with respect to up.
  std::vector<std::pair<int, int>> edge_cells;
  // Grid perimeter (counter-clockwise, edge ids) and, per vertex i (the start
  // of perimeter side i), whether the two sides meeting there are unpaired.
  std::vector<int> perimeter;
  std::vector<bool> gap;
  std::map<std::pair<int, int>, int> by_coord;

  int edge_at(int a2, int b2) const;  // -1 if absent
  int lc_edge(int t, int x) const;    // light-cone slice t, site x
  int bulk_count() const;
  std::vector<int> bulk_cells() const;
  // Light-cone: number of slices minus one.
  int lc_T() const { return 2 * M + 1; }
  int dim() const { return model == Model::Dense ? 2 : 3; }
};

// L x M rhombi, cell (x, t) at (2x, 2t). Boundary sides are paired by
// reflecting arcs, consecutively along the counter-clockwise perimeter,
// starting after the last defect. Defects are bottom sides given by x.
// In the dilute model a segment of odd length leaves its last side empty.
Domain rhombic_grid(Model m, int L, int M, double alpha, std::vector<int> defect_x = {});

// Light-cone lattice with L sites (even) and layers K|R..R|K, R..R repeated:
// slices t = 0..2M+1. Site x at slice t is the side (x+t-1, t-x); it is
// slanted iff x+t is even. Bottom and top arcs pair sites (2k-1, 2k); a
// defect pair replaces bottom arc k (1-based) when given.
Domain light_cone(Model m, int L, int M, double alpha, int defect_pair = 0);

// Heading of a path crossing side `s` into (true) or out of its cell.
double crossing_heading(const Domain& d, const Slot& s, bool into_cell);
// Turning angle of a path through cell c from slot i to slot j (no deficit).
double slot_turn(const Domain& d, const Cell& c, int i, int j);

std::string edge_label(const Edge& e);

}  // namespace qloop
