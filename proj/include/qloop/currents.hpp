#pragma once
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qloop/correspondence.hpp"

namespace qloop {

enum class TailKind { Left, Right };
enum class Component { Time, Space };
enum class ObsKind { Phi0, Phi1, Phi0bar, Phi1bar, Psi, Xi, H };
enum class Method { LoopSum, VertexContraction };

const char* obs_kind_name(ObsKind k);
std::optional<ObsKind> obs_kind_from_name(const std::string& s);
const char* method_name(Method m);

// Generator (or composite) inserted on one edge, with its tail. Left tails put
// the product of T_i over the letters of each word on the sites to the left;
// right tails are the hat currents -T^-1 J with T^-1 on the sites to the right.
struct CurrentInsertion {
  std::string label;
  FormalSum op;
  int edge = -1;
  TailKind tail = TailKind::Left;

  static CurrentInsertion generator(Gen g, int edge, TailKind tail = TailKind::Left);
  static CurrentInsertion composite(const std::string& label, const FormalSum& op, int edge,
                                    TailKind tail = TailKind::Left);
};

// Horizontal sides carry time components, slanted sides space components.
Component component_of(const Domain& d, int edge);

struct WeightedOps {
  cplx coeff{1.0, 0.0};
  OpProduct ops;
};

// Operator terms of one insertion, in the loop gauge, applied in list order.
std::vector<WeightedOps> insertion_terms(const VertexNetwork& net, const CurrentInsertion& ins);
// Terms of the operator product ins[0] ins[1] ... (the last one acts first).
std::vector<WeightedOps> product_terms(const VertexNetwork& net, const std::vector<CurrentInsertion>& ins);

// <ins[0] ins[1] ...> = Z^-1 * contraction with the insertions.
cplx expect_vertex(const VertexNetwork& net, const std::vector<CurrentInsertion>& ins);
cplx expect_vertex(const Domain& d, const AngleDictionary& dict, const std::vector<CurrentInsertion>& ins);

struct ObservableField {
  Model model = Model::Dense;
  Geometry geom = Geometry::Grid;
  ObsKind kind = ObsKind::Phi0;
  Method method = Method::LoopSum;
  std::map<int, cplx> values;  // edge id -> value
  cplx at(int edge) const;     // MissingValue if absent
};

// Generator behind a loop observable (E0, E1, Ebar0, Ebar1).
Gen observable_generator(ObsKind k);

// Scalar s with <phi(e)> = s * <e_a(e)>, where e_a is the generator insertion
// with its left tail. One entry per (model, kind, edge orientation, geometry).
struct NormalizationEntry {
  Model model;
  ObsKind kind;
  EdgeKind orientation;
  Geometry geom;
  const char* formula;
};
const std::vector<NormalizationEntry>& normalization_table();
cplx normalization(const AngleDictionary& dict, ObsKind k, EdgeKind orientation, Geometry g);

// Consistent: dilute E0-type marks carry the extra sign (-1)^k of the
// gauge-covariant generator (path leaving the mark upward or downward).
// Bare: the winding phase without the sign factor.
enum class PhaseConvention { Consistent, Bare };

// Loop-side phase of one configuration at a marked edge.
cplx loop_phase(const AngleDictionary& dict, ObsKind k, const PathGeometry& g,
                PhaseConvention pc = PhaseConvention::Consistent);

// Loop sums of several kinds in a single enumeration; values on every edge.
std::map<ObsKind, ObservableField> loop_fields(const Domain& d, const AngleDictionary& dict,
                                               const std::vector<ObsKind>& kinds, const EnumOptions& opt = {},
                                               PhaseConvention pc = PhaseConvention::Consistent);
cplx expect_loopsum(const Domain& d, const AngleDictionary& dict, ObsKind k, int edge,
                    const EnumOptions& opt = {}, PhaseConvention pc = PhaseConvention::Consistent);

// Vertex-contraction field: normalization * <generator insertion>, per edge.
ObservableField vertex_field(const VertexNetwork& net, ObsKind k, const std::vector<int>& edges = {});

// Four-point stencil around a bulk cell (slots left, bottom, top, right):
// phi(bottom) + e^{i(pi-a)} phi(right) - e^{i(pi-a)} phi(left) - phi(top).
// Both geometries are regions of the same rhombic lattice, so one stencil
// serves both. Antiholomorphic kinds use the conjugate phase.
cplx dh_residual(const Domain& d, const ObservableField& f, int cell);
// Maximum |dh_residual| over all bulk cells.
double max_dh_residual(const Domain& d, const ObservableField& f);

// Light-cone slices t for which sites (1, t) and (1, t + 1) meet at a K_left cell.
std::vector<int> left_boundary_slices(const Domain& d);

// Defect terminals D (e^{i nu h}, [1,] e^{-i nu h}) with h the up heading of each
// defect side and D the loop gauge: the algebraic-gauge boundary state under
// which the dilute psi and the adjoint ratio are evaluated.
std::map<int, CVector> dressed_defect_vectors(const Domain& d, const AngleDictionary& dict);

// Boundary observable psi on the sites x = 1 of a light-cone domain.
// Dense: psi = z^-1 (phi1 + r phi0) from loop sums. Dilute: psi = z^{1-l}(xi - i q phi0)
// with xi the adjoint current p = ad_{E1}(E0) and phi0 = z^{l-1} e0 (times e^{i alpha}
// on slanted sites), by contraction with dressed_defect_vectors.
ObservableField psi_field(const Domain& d, const AngleDictionary& dict, const EnumOptions& opt = {});
// Re[psi(1, t) + e^{i(pi - a)} psi(1, t + 1)].
double boundary_dh_residual(const Domain& d, const ObservableField& psi, int t);

// Bulk cell: j(left) + j(bottom) - j(top) - j(right); K_left half-cell:
// j(bottom) - j(right). Each j is the insertion `proto` moved to that side.
cplx conservation_residual(const VertexNetwork& net, const CurrentInsertion& proto, int cell);
// Largest |h_in - h_out| over the nonzero entries of a cell tensor, where h is
// the T1 weight of a state (the local current of the Cartan generator).
double local_flux_violation(const VertexNetwork& net, int cell);

// Light-cone double-row transfer matrix T2 = (odd layer)(even layer), built
// from the algebraic network tensors (loop gauge), acting on V^{(x)L}.
CMatrix double_row_transfer(const AngleDictionary& dict, int L);
struct ChargeResult {
  double norm = 0.0;     // ||[Delta^(L)(X), T2]||, max-entry norm
  double t2_norm = 0.0;  // ||T2||, same norm
};
ChargeResult charge_commutation(const AngleDictionary& dict, int L, const FormalSum& X);

// Dilute light-cone domain with one defect pair at the bottom, dressed_defect_vectors.
// xi: <(e1hat(x_d) + e1hat(x_d+1)) e0(edge)> by the defect formula;
// xi_direct: <ad_{Delta(E1)}[e0(edge)]> contracted as an operator on its slice.
struct AdjointResult {
  cplx xi{0.0, 0.0};
  cplx xi_direct{0.0, 0.0};
  cplx phi0{0.0, 0.0};  // <e0(edge)>
  cplx c_reference{0.0, 0.0};
  cplx c_dressed{0.0, 0.0};
  double rel_direct = 0.0;
  double rel_reference = 0.0;
  double rel_dressed = 0.0;
};
// -q^-4 (z^{2l} + z^{-2l}).
cplx adjoint_constant_reference(const AngleDictionary& dict);
// -q^-4 e^{i nu (alpha - pi)}: the ratio for the orientation-dressed defect pair.
cplx adjoint_constant_dressed(const AngleDictionary& dict);
AdjointResult adjoint_observable(const Domain& d, const AngleDictionary& dict, int edge);

struct ContinuumData {
  double g = 0.0;
  double n = 0.0;  // electric charge (real: 2n + alpha need not be integral)
  int m = 0;
  double alpha_bg = 0.0;
  double h = 0.0, hbar = 0.0;
};
ContinuumData continuum_dimensions(double g, double n, int m, double alpha_bg);
double kac(double r, double s, double g);
double coupling(Model m, double nu);          // dense 1 - 2nu; dilute 1 - 2nu as well, in (1, 2)
double background_charge(double g);           // (1 - g)
ContinuumData dense_phi0_dimensions(double nu);
ContinuumData dense_phi1_dimensions(double nu);
ContinuumData dilute_phi0_dimensions(double nu);

}  // namespace qloop
