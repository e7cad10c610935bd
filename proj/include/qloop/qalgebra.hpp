#pragma once
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qloop/numkit.hpp"
#include "qloop/report.hpp"

namespace qloop {

enum class Model { Dense, Dilute };

const char* model_name(Model m);
std::optional<Model> model_from_name(const std::string& s);

// Fixed ordering; the integer value indexes GeneratorTable.
enum class Gen { E0, E1, Ebar0, Ebar1, T0, T1, T0inv, T1inv, F0, F1 };
inline constexpr int kGenCount = 10;

const char* gen_name(Gen g);
std::optional<Gen> gen_from_name(const std::string& s);
// Node index 0 or 1 of a generator.
int gen_index(Gen g);
bool is_raising(Gen g);  // E or Ebar: coproduct X (x) 1 + T (x) X
Gen cartan_of(Gen g);    // T_i for any generator of node i
Gen cartan_inv_of(Gen g);

struct CartanData {
  std::array<std::array<int, 2>, 2> A{};
  std::array<int, 2> d{};
  bool symmetrizable() const;
  static CartanData a11();
  static CartanData a22();
  static CartanData for_model(Model m);
};

// Dense q = -e^{2 pi i nu}. The two conventions give the same q but differ in
// the branch of log q = i pi (2nu - 1) (Standard) or i pi (2nu + 1)
// (Alternative), which matters wherever fractional powers of q appear.
enum class QConvention { Standard, Alternative };

cplx dense_q(double nu);
cplx dense_logq(double nu, QConvention conv = QConvention::Standard);
cplx dilute_q(double nu);
double default_ell(double nu);

struct RepParams {
  Model model = Model::Dense;
  cplx q{1.0, 0.0};
  cplx logq{0.0, 0.0};
  // Spectral parameter stored by its logarithm so that z^p is single valued
  // across z -> 1/z.
  cplx logz{0.0, 0.0};
  double ell = 0.0;
  cplx phi_q{0.0, 0.0};
  double nu = std::numeric_limits<double>::quiet_NaN();
  double alpha = std::numeric_limits<double>::quiet_NaN();
  QConvention conv = QConvention::Standard;

  cplx z() const { return std::exp(logz); }
  cplx zpow(double p) const { return std::exp(p * logz); }
  int dim() const { return model == Model::Dense ? 2 : 3; }
  RepParams with_logz(cplx lz) const;
  RepParams inverse_z() const { return with_logz(-logz); }

  static RepParams dense(double nu, cplx logz, QConvention conv = QConvention::Standard);
  static RepParams dilute(double nu, cplx logz);
  static RepParams dilute(double nu, cplx logz, double ell);
  // Algebra-only point: q and z free, nu undefined.
  static RepParams generic(Model m, cplx q, cplx logz, double ell = 1.0 / 3.0);

  // Throws InconsistentParams.
  void validate() const;
};

struct GeneratorTable {
  Model model = Model::Dense;
  cplx q{1.0, 0.0};
  int dim = 2;
  std::array<CMatrix, kGenCount> m;
  const CMatrix& operator[](Gen g) const { return m[static_cast<int>(g)]; }
  CMatrix& operator[](Gen g) { return m[static_cast<int>(g)]; }
};

GeneratorTable build_rep(const RepParams& p);
// Images Delta(X) on a (x) b for every label.
GeneratorTable coproduct_table(const GeneratorTable& a, const GeneratorTable& b);
CMatrix coproduct(Gen g, const GeneratorTable& a, const GeneratorTable& b);
CMatrix coproduct_opposite(Gen g, const GeneratorTable& a, const GeneratorTable& b);

// Formal linear combinations of words in the generators.
struct Term {
  cplx coeff;
  std::vector<Gen> word;
};
using FormalSum = std::vector<Term>;

CMatrix evaluate(const FormalSum& s, const GeneratorTable& t);

// q-number conventions: [n]_q = (q^n - q^-n)/(q - q^-1).
cplx q_bracket(int n, cplx q);
cplx q_binomial(int m, int k, cplx q);

// Relations (1)-(4) on one site, and on Delta(a (x) b) when `second` is given.
Report check_defining_relations(const GeneratorTable& t, const CartanData& c, cplx q, double tol,
                                const std::string& tag = "site");
Report check_coproduct_relations(const GeneratorTable& a, const GeneratorTable& b, const CartanData& c,
                                 double tol);

enum class TailSide { Left, Right };

// Term x of Delta^(L)(label). Left tails: T_a on sites < x. Right tails (hat
// currents): -T_a^{-1} J_a at x and T_a^{-1} on sites > x.
CMatrix coproduct_insert(const std::vector<GeneratorTable>& sites, Gen label, int x,
                         TailSide side = TailSide::Left);
// Local left-tail current of a composite: each word carries the product of the
// tails of its letters.
CMatrix local_current(const std::vector<GeneratorTable>& sites, const FormalSum& s, int x);
// One-site tail operator of a word (product of T_i over its letters).
CMatrix word_tail(const GeneratorTable& t, const std::vector<Gen>& word);

CMatrix charge(const std::vector<GeneratorTable>& sites, Gen label);
CMatrix charge(const std::vector<GeneratorTable>& sites, const FormalSum& s);

// ad_J(X) = J X - Theta X Thetahat J.
CMatrix adjoint_action_general(const CMatrix& J, const CMatrix& theta, const CMatrix& theta_hat,
                               const CMatrix& X);
CMatrix adjoint_action(const GeneratorTable& t, Gen a, Gen b);
// Term-by-term Sweedler evaluation sum J_(1) X S(J_(2)) for raising J_a.
CMatrix adjoint_action_sweedler(const GeneratorTable& t, Gen a, const CMatrix& X);

struct CoidealSpec {
  Model model = Model::Dense;
  cplx r{0.0, 0.0};
  cplx q{1.0, 0.0};
  FormalSum Q, Qbar;
  // Generating set used for the K-matrix equation.
  std::vector<std::pair<std::string, FormalSum>> generators() const;

  static CoidealSpec dense(cplx q, cplx r);
  // r defaults to i q^{-1}.
  static CoidealSpec dilute(cplx q);
  static CoidealSpec dilute(cplx q, cplx r);
  static CoidealSpec for_model(Model m, cplx q, cplx r);
};

// The dilute element P = ad_{E1}(E0) = E1 E0 - q^{-4} E0 E1.
FormalSum dilute_P(cplx q);

}  // namespace qloop
