#pragma once
#include <array>
#include <functional>
#include <vector>

#include "qloop/qalgebra.hpp"

namespace qloop {

enum class Gradation { Principal, Homogeneous };

struct RMatrix {
  CMatrix m;  // on V_z (x) V_w
  RepParams pz, pw;
  Gradation gradation = Gradation::Principal;
  bool checked = false;
  int nullity = 0;
};

std::vector<Gen> full_generators();
std::vector<Gen> tl_subalgebra_generators();  // E1, Ebar1, T1

// max_X ||R Delta(X) - Delta'(X) R|| / ||R||.
double intertwining_residual(const CMatrix& R, const GeneratorTable& gz, const GeneratorTable& gw,
                             const std::vector<Gen>& gens);
// Same for a checked operator Y : V_z (x) V_w -> V_w (x) V_z, Y Delta_{z,w}(X) = Delta_{w,z}(X) Y.
double check_intertwining_residual(const CMatrix& Y, const GeneratorTable& gz, const GeneratorTable& gw,
                                   const std::vector<Gen>& gens);

RMatrix solve_R(const RepParams& pz, const RepParams& pw, const std::vector<Gen>& gens = full_generators(),
                double tol = 1e-10);
// Basis of all Y with Y Delta_{z,w}(X) = Delta_{w,z}(X) Y for X in gens.
std::vector<CMatrix> solve_R_sub(const RepParams& pz, const RepParams& pw,
                                 const std::vector<Gen>& gens = tl_subalgebra_generators(), double tol = 1e-10);

// Closed forms, x = z/w.
CMatrix R_closed_dense(cplx q, cplx x);
// omega[1..19]; logx = log(z/w).
std::array<cplx, 20> omega_weights(cplx q, cplx logx, double ell);
CMatrix R_closed_dilute(cplx q, cplx logx, double ell);
CMatrix R_closed_form(const RepParams& pz, const RepParams& pw);

CMatrix rcheck(const CMatrix& R);  // P R

// Diagonal gauge relating the solved dilute R to the closed form:
// R_reference ~ (D (x) D) R_solved (D (x) D)^{-1}; identity for the dense model.
CMatrix loop_gauge(Model m);

enum class Side { Left, Right };

struct KMatrix {
  CMatrix m;
  Side side = Side::Left;
  cplx r{0.0, 0.0};
  RepParams params;
};

// Left: K pi_{1/z}(Y) = pi_z(Y) K. Right: K pi_z(Y) = pi_{1/z}(Y) K.
// Normalised so that the middle (dense: first) diagonal entry matches K_closed_form.
KMatrix solve_K(const RepParams& p, const CoidealSpec& c, Side side = Side::Left, double tol = 1e-10);
double K_intertwining_residual(const CMatrix& K, const RepParams& p, const CoidealSpec& c, Side side);
// Closed diagonal forms (left boundary).
CMatrix K_closed_form(const RepParams& p, cplx r);
// Diagonal left K solving the dilute coideal equation in closed form.
CMatrix K_dilute_closed_form(const RepParams& p, cplx r);

using RMaker = std::function<CMatrix(cplx logx)>;
using KMaker = std::function<CMatrix(cplx logz)>;

RMaker solved_R_maker(Model m, double nu_or_nan, cplx q, double ell);
RMaker closed_R_maker(Model m, cplx q, double ell);

// R12(z1/z2) R13(z1/z3) R23(z2/z3) = R23 R13 R12.
Report check_ybe(const RMaker& R, int d, cplx l1, cplx l2, cplx l3, double tol = 1e-8);
// R12(z1/z2) K1(z1) R21(z1 z2) K2(z2) = K2(z2) R12(z1 z2) K1(z1) R21(z1/z2).
Report check_reflection(const RMaker& R, const KMaker& K, int d, cplx l1, cplx l2, double tol = 1e-8);

// U^{-1} Y U' with U = w^{sz/2} (x) z^{sz/2}, U' = z^{sz/2} (x) w^{sz/2} (dense only).
CMatrix gauge_to_homogeneous(const CMatrix& Ycheck, cplx logz, cplx logw, Model m = Model::Dense);

// Embed a two-site operator on sites (i, j) of three (0-based, i < j).
CMatrix embed_two_site(const CMatrix& R, int d, int i, int j);

}  // namespace qloop
