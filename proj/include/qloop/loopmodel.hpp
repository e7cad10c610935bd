#pragma once
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qloop/lattice.hpp"

namespace qloop {

enum class TileKind {
  A, B,                                        // dense bulk
  T, U1a, U1b, U2a, U2b, Va, Vb, W1, W2,       // dilute bulk
  BoundaryArc, BoundaryEmpty,                  // reflecting arcs
  KArc, KEmpty,                                // K half-cells
  DefectOn, DefectOff                          // terminals
};

const char* tile_name(TileKind k);
std::optional<TileKind> tile_from_name(const std::string& s);

struct TileSpec {
  std::vector<std::pair<int, int>> arcs;  // slot pairs
  std::vector<int> empty;                 // slots left unoccupied
  bool terminal = false;                  // DefectOn: slot 0 ends a path
};

const TileSpec& tile_spec(TileKind k);
// Options per cell kind, in enumeration order.
const std::vector<TileKind>& tile_options(Model m, CellKind c);

// Weights of the loop model. Bulk tile weights; boundary weights for the
// dilute K half-cells (rho: empty, kappa: arc) on the left and right; the
// dense deficit angle xi (complex in general). Closed loops and open paths
// are weighted by their orientation sums 2 cos(nu Theta).
struct LoopWeights {
  Model model = Model::Dense;
  double nu = 0.0;
  std::map<TileKind, cplx> bulk;
  cplx rho_left{1.0, 0.0}, kappa_left{1.0, 0.0};
  cplx rho_right{1.0, 0.0}, kappa_right{1.0, 0.0};
  cplx xi{0.0, 0.0};

  // a = q x - 1/(q x), b = x - 1/x.
  static LoopWeights dense(double nu, cplx q, cplx x);
  // t, u1, u2, v, w1, w2 at spectral ratio x.
  static LoopWeights dilute(double nu, cplx q, cplx x);
  cplx tile_weight(const Cell& c, TileKind k) const;
};

std::array<cplx, 6> dilute_weight_formulas(cplx q, cplx x);  // t, u1, u2, v, w1, w2
cplx dense_tau(cplx q);                                      // -(q + 1/q)
cplx dilute_tau(cplx q);                                     // -(q^4 + q^-4)
// Reference boundary fugacity -(e^{i nu (2pi - n xi)} + c.c.) and the one
// consistent with the orientation dressing (+2 cos).
cplx tau_boundary_reference(double nu, cplx xi, int n);
cplx tau_boundary(double nu, cplx xi, int n);

struct LoopConfig {
  const Domain* domain = nullptr;
  std::vector<TileKind> tiles;  // one per cell
  std::vector<std::string> names() const;
};

// Geometric turning of a traversal, kept as a real angle plus the signed
// number of deficit-carrying boundary visits: total = geo - deficit_count * xi.
struct Turn {
  double geo = 0.0;
  int deficit = 0;
  int contacts = 0;  // K half-cells visited
  cplx value(cplx xi) const { return geo - static_cast<double>(deficit) * xi; }
};

struct PathStep {
  int edge = -1;
  Turn at;  // turning accumulated from the start up to this edge
};

struct OpenPath {
  std::vector<PathStep> steps;  // first step is the starting terminal edge
  Turn total;
  bool ends_at_cut = false;
};

struct Trace {
  bool valid = false;
  std::vector<Turn> loops;
  std::vector<OpenPath> paths;
  int occupied_edges = 0;
};

// Trace all strands. A `cut` edge must be occupied on exactly one side.
Trace trace(const LoopConfig& c, int cut = -1);
// Independent loop count by union-find over the tile connections.
int count_loops_union_find(const LoopConfig& c, int cut = -1);

struct EnumOptions {
  int max_bulk_dense = 20;
  int max_bulk_dilute = 9;
  std::size_t max_configs = std::size_t{1} << 24;
};

std::size_t config_count(const Domain& d);
// Visits every tile assignment in row-major cell order (cell 0 slowest).
void enumerate_configs(const Domain& d, const std::function<void(const LoopConfig&)>& f,
                       const EnumOptions& opt = {});

// Product of tile weights times the closed-loop orientation sums.
cplx config_weight(const LoopConfig& c, const Trace& tr, const LoopWeights& w);
// config_weight times the orientation sums of the open paths.
cplx config_weight_with_paths(const LoopConfig& c, const Trace& tr, const LoopWeights& w);

struct PathGeometry {
  double theta = 0.0;  // geometric winding from the start to the mark
  Turn turn;           // full turning record up to the mark
  int k = 0;           // theta = k pi (horizontal) or k pi - alpha (slanted)
  int n_contacts = 0;  // boundary visits before the mark minus after it
  double start_offset = 0.0;  // heading of the path's first step minus pi/2
};

// Winding of the open path from its starting terminal to `edge`.
PathGeometry winding(const LoopConfig& c, const Trace& tr, int edge);

}  // namespace qloop
