#pragma once
#include <map>
#include <vector>

#include "qloop/intertwiners.hpp"
#include "qloop/lattice.hpp"
#include "qloop/loopmodel.hpp"
#include "qloop/network.hpp"

namespace qloop {

// Ties lattice geometry to algebra parameters. Slanted sides carry the
// representation at z, horizontal sides the one at w.
struct AngleDictionary {
  Model model = Model::Dense;
  double nu = 0.0, alpha = 0.0;
  QConvention conv = QConvention::Standard;
  cplx q{1.0, 0.0}, logq{0.0, 0.0};
  double ell = 0.0;
  cplx logz{0.0, 0.0}, logw{0.0, 0.0};
  cplx r{0.0, 0.0};
  cplx xi{0.0, 0.0};  // dense deficit angle, e^{2i nu xi} = (1 + r z^-2) / (1 + r z^2)
  bool has_boundary = false;

  cplx z() const { return std::exp(logz); }
  cplx w() const { return std::exp(logw); }
  cplx logx() const { return logz - logw; }
  cplx x() const { return std::exp(logx()); }
  RepParams rep(EdgeKind k) const;
  RepParams rep_z() const { return rep(EdgeKind::Slanted); }
  RepParams rep_w() const { return rep(EdgeKind::Horizontal); }
  CoidealSpec coideal() const;

  // Grid: x = e^{-2i nu alpha} (dense), x^{2l} = e^{-2i nu alpha} (dilute);
  // w is free and given by its logarithm.
  static AngleDictionary grid(Model m, double nu, double alpha, cplx logw = 0.0,
                              QConvention conv = QConvention::Standard);
  // Light-cone: w = 1/z with z = e^{-i nu alpha} (dense) or
  // z^{2l} = e^{-i nu alpha} (dilute). Dilute boundaries need r = i/q.
  static AngleDictionary light_cone(Model m, double nu, double alpha, cplx r,
                                    QConvention conv = QConvention::Standard);
  static AngleDictionary light_cone(Model m, double nu, double alpha);  // dilute default r = i/q

  // Same geometry with another dilute l (x and z re-derived from the angle relations).
  AngleDictionary with_ell(double l) const;
  LoopWeights loop_weights() const;
  // max of |x - e^{-2i nu alpha}| style residuals for the stored relations.
  double consistency_residual() const;
};

// Dilute l: the reference 2nu/(3(2nu+1)), or 4nu/(3(2nu+1)) for which the
// E0 loop observable is discretely holomorphic with the covariant generator.
enum class DiluteEll { Reference, Holomorphic };
double dilute_ell(double nu, DiluteEll e);

// e^{2i nu xi} = (1 + r z^-2)/(1 + r z^2), principal branch of the logarithm.
cplx deficit_from_r(double nu, cplx z, cplx r);
// Inverse relation: r from xi at z.
cplx r_from_deficit(double nu, cplx z, cplx xi);

// Dilute alternative convention nu = 1/2 - nu': the observable phase exponent
// and the spectral ratio x = e^{3i(nu' - 1) alpha}.
struct AltConvention {
  double nu_prime = 0.0;
  double nu() const { return 0.5 - nu_prime; }
  double phase_exponent() const { return -(1.5 * nu_prime - 0.5); }
  cplx x(double alpha) const { return std::exp(3.0 * kI * (nu_prime - 1.0) * alpha); }
  static AltConvention from_nu(double nu) { return {0.5 - nu}; }
};

// Orientation dressing of one tile on one cell: tensor over the slot states
// (row-major in slot order), each admissible arrow assignment weighted by
// e^{i nu (turn)} per strand. States: dense {up, down}; dilute {up, empty, down}.
std::vector<cplx> dress_cell(const Domain& d, const Cell& c, TileKind k, double nu, cplx xi = 0.0);

// Bulk tile as an operator V (x) V -> V (x) V: rows (top, right), cols (left, bottom).
CMatrix dress_tile(Model m, TileKind k, double nu, double alpha);
// Slot-ordered bulk tensor <-> Rcheck matrix.
std::vector<cplx> rcheck_to_slots(const CMatrix& rc, int dim);
CMatrix slots_to_rcheck(const std::vector<cplx>& t, int dim);

// Rcheck = sum of weight * dressed tile.
CMatrix assemble_R(const AngleDictionary& dict);
// Loop-derived K: dense diag(e^{-i nu (alpha - xi)}, e^{i nu (alpha - xi)}) on
// the left; dilute diag(kappa e^{-i nu alpha}, rho, kappa e^{i nu alpha}).
CMatrix assemble_K(const AngleDictionary& dict, Side side);
// Reference dilute boundary weights rho = z + i q^-1 / z, kappa = 1/z + i q^-1 z.
CMatrix assemble_K_reference_dilute(const AngleDictionary& dict);
// Least-squares coefficients of rc over the given tile operators.
std::vector<cplx> decompose(const CMatrix& rc, const std::vector<CMatrix>& basis, double* resid = nullptr);

enum class VertexSource { Algebraic, Loop };

// Vertex network: one tensor per cell, legs are edge ids. Algebraic tensors
// come from the solved R and K (conjugated into the loop gauge; K rescaled to
// the loop normalisation); arcs and terminals are always loop dressings.
struct VertexNetwork {
  const Domain* domain = nullptr;
  AngleDictionary dict;
  std::vector<Tensor> tensors;
  CMatrix gauge;          // D: algebraic operators enter as D O D^-1
  cplx k_scale_left{1.0, 0.0}, k_scale_right{1.0, 0.0};  // K_alg = scale * K_loop
};

VertexNetwork build_network(const Domain& d, const AngleDictionary& dict, VertexSource src,
                            const std::map<int, CVector>& terminal_override = {});

struct EdgeOp {
  int edge = -1;
  CMatrix m;  // maps the producer-side state to the consumer-side state
};
using OpProduct = std::vector<EdgeOp>;  // ops on one edge compose in list order

cplx contract(const VertexNetwork& net, const OpProduct& ops = {});

struct PartitionResult {
  cplx z_loop{0.0, 0.0}, z_vertex{0.0, 0.0};
  double rel = 0.0;
  std::size_t configs = 0, valid = 0;
};
PartitionResult partition_functions(const Domain& d, const AngleDictionary& dict, const EnumOptions& opt = {});
Report partition_equality(const Domain& d, const AngleDictionary& dict, double tol = 1e-9);

}  // namespace qloop
