#include "qloop/errors.hpp"
#include "qloop/qalgebra.hpp"
#include "qloop/sampling.hpp"
#include "test_util.hpp"

using namespace qloop;
using qloop::testing::diag;

namespace {

CMatrix I(int d) { return CMatrix::Identity(d, d); }

std::vector<GeneratorTable> sites(const RepParams& p, int L, Sampler& rng) {
  std::vector<GeneratorTable> out;
  for (int i = 0; i < L; ++i) out.push_back(build_rep(p.with_logz(rng.generic_log())));
  return out;
}

}  // namespace

TEST(BuildRep, DenseMatrices) {
  const RepParams p = RepParams::dense(0.21, cplx(0.2, 0.5));
  const GeneratorTable t = build_rep(p);
  CMatrix e1 = CMatrix::Zero(2, 2);
  e1(0, 1) = p.z();
  EXPECT_MAT_NEAR(t[Gen::E1], e1, 1e-15);
  EXPECT_MAT_NEAR(t[Gen::T1], diag({p.q, 1.0 / p.q}), 1e-15);
  EXPECT_NEAR(std::abs(p.q + std::exp(2.0 * kPi * kI * 0.21)), 0.0, 1e-15);
}

TEST(BuildRep, DiluteCartan) {
  const RepParams p = RepParams::dilute(-0.2, cplx(0.1, -0.3));
  const GeneratorTable t = build_rep(p);
  EXPECT_MAT_NEAR(t[Gen::T0], diag({std::pow(p.q, -2), 1.0, std::pow(p.q, 2)}), 1e-14);
}

TEST(BuildRep, BarredGeneratorsFromF) {
  Sampler rng(2);
  for (Model m : {Model::Dense, Model::Dilute}) {
    const GeneratorTable t = build_rep(RepParams::generic(m, rng.generic_q(), rng.generic_log()));
    const CartanData c = CartanData::for_model(m);
    EXPECT_MAT_NEAR(t[Gen::Ebar0], std::pow(t.q, c.d[0]) * t[Gen::T0] * t[Gen::F0], 1e-12);
    EXPECT_MAT_NEAR(t[Gen::Ebar1], std::pow(t.q, c.d[1]) * t[Gen::T1] * t[Gen::F1], 1e-12);
  }
}

TEST(QNumbers, BinomialEdgeCases) {
  const cplx q{0.8, 0.9};
  for (int m = 0; m < 5; ++m) {
    EXPECT_NEAR(std::abs(q_binomial(m, 0, q) - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(q_binomial(m, m, q) - 1.0), 0.0, 1e-14);
  }
  EXPECT_NEAR(std::abs(q_bracket(2, q) - (q + 1.0 / q)), 0.0, 1e-14);
  // [3 choose 1] = [3]
  EXPECT_NEAR(std::abs(q_binomial(3, 1, q) - q_bracket(3, q)), 0.0, 1e-13);
}

TEST(Relations, HoldOnSitesAndCoproducts) {
  Sampler rng(9);
  for (Model m : {Model::Dense, Model::Dilute}) {
    const CartanData c = CartanData::for_model(m);
    for (int s = 0; s < 5; ++s) {
      const cplx q = rng.generic_q();
      const GeneratorTable a = build_rep(RepParams::generic(m, q, rng.generic_log()));
      const GeneratorTable b = build_rep(RepParams::generic(m, q, rng.generic_log()));
      const Report one = check_defining_relations(a, c, q, 1e-10);
      EXPECT_TRUE(one.all_pass()) << one.max_value();
      EXPECT_FALSE(one.entries.empty());
      const Report two = check_coproduct_relations(a, b, c, 1e-9);
      EXPECT_TRUE(two.all_pass()) << two.max_value();
    }
  }
}

TEST(Relations, DetectBrokenRepresentation) {
  GeneratorTable t = build_rep(RepParams::dense(0.2, cplx(0.1, 0.2)));
  t[Gen::E1] *= 1.5;  // [E1, F1] no longer matches (T - T^-1)/(q - q^-1)
  EXPECT_FALSE(check_defining_relations(t, CartanData::a11(), t.q, 1e-10).all_pass());
}

TEST(Coproduct, InsertionTerms) {
  Sampler rng(4);
  const RepParams p = RepParams::dense(0.23, 0.0);
  auto one = sites(p, 1, rng);
  EXPECT_MAT_NEAR(coproduct_insert(one, Gen::E1, 1), one[0][Gen::E1], 1e-15);
  auto two = sites(p, 2, rng);
  EXPECT_MAT_NEAR(coproduct_insert(two, Gen::E1, 2), kron(two[0][Gen::T1], two[1][Gen::E1]), 1e-14);
  auto three = sites(p, 3, rng);
  EXPECT_MAT_NEAR(coproduct_insert(three, Gen::E0, 2), kron_all({three[0][Gen::T0], three[1][Gen::E0], I(2)}), 1e-14);
  EXPECT_THROW(coproduct_insert(three, Gen::E0, 4), PositionOutOfRange);
}

TEST(Coproduct, RightTailInsertion) {
  Sampler rng(6);
  auto s = sites(RepParams::dense(0.23, 0.0), 3, rng);
  const CMatrix hat = -s[1][Gen::T1inv] * s[1][Gen::E1];
  EXPECT_MAT_NEAR(coproduct_insert(s, Gen::E1, 2, TailSide::Right), kron_all({I(2), hat, s[2][Gen::T1inv]}), 1e-14);
}

TEST(Charge, TwoSiteRaisingAndCartan) {
  Sampler rng(8);
  for (Model m : {Model::Dense, Model::Dilute}) {
    const RepParams p = RepParams::generic(m, rng.generic_q(), 0.0);
    auto one = sites(p, 1, rng);
    EXPECT_MAT_NEAR(charge(one, Gen::E1), one[0][Gen::E1], 1e-15);
    auto two = sites(p, 2, rng);
    const int d = two[0].dim;
    EXPECT_MAT_NEAR(charge(two, Gen::E1), kron(two[0][Gen::E1], I(d)) + kron(two[0][Gen::T1], two[1][Gen::E1]),
                    1e-14);
    EXPECT_MAT_NEAR(charge(two, Gen::E1), coproduct(Gen::E1, two[0], two[1]), 1e-14);
    for (int L = 1; L <= 4; ++L) {
      auto s = sites(p, L, rng);
      std::vector<CMatrix> t0;
      for (const auto& g : s) t0.push_back(g[Gen::T0]);
      EXPECT_MAT_NEAR(charge(s, Gen::T0), kron_all(t0), 1e-13);
      const CMatrix prod = charge(s, Gen::T0) * charge(s, Gen::T0inv);
      EXPECT_MAT_NEAR(prod, I(static_cast<int>(prod.rows())), 1e-12);
    }
  }
}

TEST(Charge, IteratedCoproductIsHomomorphism) {
  // Delta^(3) preserves [E1, F1] = (T1 - T1^-1)/(q - q^-1).
  Sampler rng(10);
  const RepParams p = RepParams::dense(0.3, 0.0);
  auto s = sites(p, 3, rng);
  const CMatrix E = charge(s, Gen::E1), F = charge(s, Gen::F1), T = charge(s, Gen::T1), Ti = charge(s, Gen::T1inv);
  EXPECT_MAT_NEAR(E * F - F * E, (T - Ti) / (p.q - 1.0 / p.q), 1e-11);
}

TEST(Adjoint, TrivialThetaIsCommutator) {
  Sampler rng(12);
  const GeneratorTable t = build_rep(RepParams::dense(0.2, rng.generic_log()));
  const CMatrix J = t[Gen::E0], X = t[Gen::Ebar1];
  EXPECT_MAT_NEAR(adjoint_action_general(J, I(2), I(2), X), J * X - X * J, 1e-15);
}

TEST(Adjoint, DiluteP) {
  const RepParams p = RepParams::dilute(-0.3, cplx(0.2, 0.1));
  const GeneratorTable t = build_rep(p);
  const CMatrix expect = t[Gen::E1] * t[Gen::E0] - std::pow(p.q, -4) * t[Gen::E0] * t[Gen::E1];
  EXPECT_MAT_NEAR(adjoint_action(t, Gen::E1, Gen::E0), expect, 1e-13);
  EXPECT_MAT_NEAR(evaluate(dilute_P(p.q), t), expect, 1e-13);
}

TEST(Adjoint, SweedlerAgreesWithClosedForm) {
  Sampler rng(14);
  for (Model m : {Model::Dense, Model::Dilute}) {
    const GeneratorTable t = build_rep(RepParams::generic(m, rng.generic_q(), rng.generic_log()));
    for (Gen a : {Gen::E0, Gen::E1, Gen::Ebar0, Gen::Ebar1})
      for (Gen b : {Gen::E0, Gen::E1, Gen::Ebar1})
        EXPECT_MAT_NEAR(adjoint_action_sweedler(t, a, t[b]), adjoint_action(t, a, b), 1e-12);
  }
}

TEST(Params, ValidationRejectsBadInput) {
  RepParams p = RepParams::dense(0.2, 0.0);
  p.q = 0.0;
  EXPECT_THROW(p.validate(), InconsistentParams);
  EXPECT_FALSE(model_from_name("trilute").has_value());
  EXPECT_EQ(*model_from_name("dilute"), Model::Dilute);
}

TEST(Params, DenseConventionsShareQ) {
  const double nu = 0.17;
  const cplx a = std::exp(dense_logq(nu, QConvention::Standard));
  const cplx b = std::exp(dense_logq(nu, QConvention::Alternative));
  EXPECT_NEAR(std::abs(a - b), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(a - dense_q(nu)), 0.0, 1e-14);
}

TEST(Coideal, ChargesAreBuiltFromGenerators) {
  const cplx q = dense_q(0.2);
  const CoidealSpec c = CoidealSpec::dense(q, 0.5);
  EXPECT_FALSE(c.Q.empty());
  EXPECT_FALSE(c.Qbar.empty());
  EXPECT_FALSE(c.generators().empty());
}
