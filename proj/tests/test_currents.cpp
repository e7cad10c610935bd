#include "qloop/currents.hpp"
#include "qloop/errors.hpp"
#include "qloop/json_io.hpp"
#include "qloop/sampling.hpp"
#include "test_util.hpp"

using namespace qloop;

namespace {

double max_diff(const ObservableField& a, const ObservableField& b) {
  double m = 0.0;
  for (const auto& [e, v] : a.values) m = std::max(m, std::abs(v - b.at(e)));
  return m;
}

double scale(const ObservableField& f) {
  double m = 0.0;
  for (const auto& [e, v] : f.values) m = std::max(m, std::abs(v));
  return m;
}

ObservableField constant_field(const Domain& d, ObsKind k, cplx v) {
  ObservableField f;
  f.kind = k;
  for (const auto& e : d.edges) f.values[e.id] = v;
  return f;
}

}  // namespace

TEST(Vertex, EmptyInsertionIsOne) {
  const double alpha = 1.1;
  const Domain d = rhombic_grid(Model::Dense, 2, 2, alpha, {1, 2});
  const AngleDictionary g = AngleDictionary::grid(Model::Dense, 0.2, alpha, cplx(0.1, 0.2));
  EXPECT_NEAR(std::abs(expect_vertex(d, g, {}) - 1.0), 0.0, 1e-12);
}

TEST(DualMethod, DenseGridAllKinds) {
  const double alpha = 1.1;
  const AngleDictionary g = AngleDictionary::grid(Model::Dense, 0.2, alpha, cplx(0.1, 0.2));
  for (const Domain& d : {rhombic_grid(Model::Dense, 2, 2, alpha, {1, 2}), rhombic_grid(Model::Dense, 2, 3, alpha, {1, 2})}) {
    const std::vector<ObsKind> kinds = {ObsKind::Phi0, ObsKind::Phi1, ObsKind::Phi0bar, ObsKind::Phi1bar};
    auto loop = loop_fields(d, g, kinds);
    const VertexNetwork net = build_network(d, g, VertexSource::Algebraic);
    for (ObsKind k : kinds) {
      const ObservableField v = vertex_field(net, k);
      EXPECT_LT(max_diff(loop.at(k), v), 1e-9) << obs_kind_name(k);
      EXPECT_GT(scale(v), 1e-3);
    }
  }
}

TEST(DualMethod, SingleEdgeLoopSum) {
  const double alpha = 0.8;
  const Domain d = rhombic_grid(Model::Dense, 2, 3, alpha, {1, 2});
  const AngleDictionary g = AngleDictionary::grid(Model::Dense, 0.3, alpha, cplx(0.0, 0.3));
  const int edge = d.edge_at(2, 3);  // interior horizontal side
  ASSERT_GE(edge, 0);
  const VertexNetwork net = build_network(d, g, VertexSource::Algebraic);
  const cplx loop = expect_loopsum(d, g, ObsKind::Phi0, edge);
  const cplx vert = vertex_field(net, ObsKind::Phi0, {edge}).at(edge);
  EXPECT_NEAR(std::abs(loop - vert), 0.0, 1e-9);
  const cplx e0 = expect_vertex(net, {CurrentInsertion::generator(Gen::E0, edge)});
  EXPECT_NEAR(std::abs(vert - normalization(g, ObsKind::Phi0, EdgeKind::Horizontal, Geometry::Grid) * e0), 0.0, 1e-12);
}

TEST(DualMethod, DiluteGridAndLightCone) {
  const double alpha = 1.2, nu = -0.3;
  const double ell = dilute_ell(nu, DiluteEll::Holomorphic);
  const AngleDictionary g = AngleDictionary::grid(Model::Dilute, nu, alpha, 0.2).with_ell(ell);
  const Domain d = rhombic_grid(Model::Dilute, 1, 2, alpha, {1});
  const auto loop = loop_fields(d, g, {ObsKind::Phi0, ObsKind::Phi1});
  const VertexNetwork net = build_network(d, g, VertexSource::Algebraic);
  EXPECT_LT(max_diff(loop.at(ObsKind::Phi0), vertex_field(net, ObsKind::Phi0)), 1e-9);
  EXPECT_LT(max_diff(loop.at(ObsKind::Phi1), vertex_field(net, ObsKind::Phi1)), 1e-9);

  const AngleDictionary lc = AngleDictionary::light_cone(Model::Dilute, nu, alpha).with_ell(ell);
  const Domain dl = light_cone(Model::Dilute, 2, 1, alpha, 1);
  const auto ll = loop_fields(dl, lc, {ObsKind::Phi0});
  EXPECT_LT(max_diff(ll.at(ObsKind::Phi0), vertex_field(build_network(dl, lc, VertexSource::Algebraic), ObsKind::Phi0)),
            1e-9);
}

TEST(Holomorphicity, ConstantFieldTelescopes) {
  const Domain d = rhombic_grid(Model::Dense, 2, 2, 0.7);
  EXPECT_LT(max_dh_residual(d, constant_field(d, ObsKind::Phi0, cplx(0.3, -1.2))), 1e-15);
  EXPECT_LT(max_dh_residual(d, constant_field(d, ObsKind::Phi1bar, cplx(2.0, 0.5))), 1e-15);
}

TEST(Holomorphicity, PerConfigurationPhi1) {
  const double alpha = 1.3;
  const Domain d = rhombic_grid(Model::Dense, 2, 3, alpha, {1, 2});
  const AngleDictionary g = AngleDictionary::grid(Model::Dense, 0.17, alpha);
  int seen = 0;
  enumerate_configs(d, [&](const LoopConfig& c) {
    const Trace tr = trace(c);
    ASSERT_TRUE(tr.valid);
    ObservableField f = constant_field(d, ObsKind::Phi1, 0.0);
    for (const PathStep& s : tr.paths.front().steps)
      f.values[s.edge] = loop_phase(g, ObsKind::Phi1, winding(c, tr, s.edge));
    EXPECT_LT(max_dh_residual(d, f), 1e-12);
    ++seen;
  });
  EXPECT_EQ(seen, 64);
}

TEST(Holomorphicity, DenseExpectationsBothChiralities) {
  const double alpha = 2.0;
  const Domain d = rhombic_grid(Model::Dense, 3, 2, alpha, {1, 2});
  const AngleDictionary g = AngleDictionary::grid(Model::Dense, 0.33, alpha, cplx(0.2, 0.1));
  const auto f = loop_fields(d, g, {ObsKind::Phi0, ObsKind::Phi0bar, ObsKind::Phi1, ObsKind::Phi1bar});
  for (const auto& [k, field] : f) EXPECT_LT(max_dh_residual(d, field), 1e-9) << obs_kind_name(k);
  // Holomorphic stencil on an antiholomorphic field fails.
  ObservableField wrong = f.at(ObsKind::Phi0bar);
  wrong.kind = ObsKind::Phi0;
  EXPECT_GT(max_dh_residual(d, wrong), 1e-4);
}

TEST(Holomorphicity, DiluteHolomorphicEll) {
  const double alpha = 0.9, nu = -0.2;
  const AngleDictionary g =
      AngleDictionary::grid(Model::Dilute, nu, alpha, 0.2).with_ell(dilute_ell(nu, DiluteEll::Holomorphic));
  const Domain d = rhombic_grid(Model::Dilute, 1, 2, alpha, {1});
  const auto f = loop_fields(d, g, {ObsKind::Phi0, ObsKind::Phi0bar});
  EXPECT_LT(max_dh_residual(d, f.at(ObsKind::Phi0)), 1e-9);
  EXPECT_LT(max_dh_residual(d, f.at(ObsKind::Phi0bar)), 1e-9);
}

TEST(Normalization, TableCoversEveryCase) {
  EXPECT_EQ(normalization_table().size(), 32u);
  for (const auto& e : normalization_table()) EXPECT_NE(std::string(e.formula), "");
}

TEST(Boundary, DensePsiRealR) {
  Sampler rng(61);
  for (int s = 0; s < 3; ++s) {
    const double alpha = rng.alpha(), nu = rng.nu(Model::Dense), r = rng.uniform(-1.5, 1.5);
    const Domain d = light_cone(Model::Dense, 2, 2, alpha, 1);
    const AngleDictionary lc = AngleDictionary::light_cone(Model::Dense, nu, alpha, r);
    const ObservableField psi = psi_field(d, lc);
    for (int t : left_boundary_slices(d)) EXPECT_LT(boundary_dh_residual(d, psi, t), 1e-9);
  }
  // Free boundary.
  const Domain d = light_cone(Model::Dense, 2, 1, 0.8, 1);
  const ObservableField psi = psi_field(d, AngleDictionary::light_cone(Model::Dense, 0.2, 0.8, 0.0));
  for (int t : left_boundary_slices(d)) EXPECT_LT(boundary_dh_residual(d, psi, t), 1e-9);
  EXPECT_EQ(boundary_dh_residual(d, constant_field(d, ObsKind::Psi, 0.0), 0), 0.0);
}

TEST(Boundary, DilutePsi) {
  for (double alpha : {0.7, 2.1}) {
    const Domain d = light_cone(Model::Dilute, 2, 1, alpha, 1);
    const ObservableField psi = psi_field(d, AngleDictionary::light_cone(Model::Dilute, -0.25, alpha));
    EXPECT_EQ(psi.method, Method::VertexContraction);
    for (int t : left_boundary_slices(d)) EXPECT_LT(boundary_dh_residual(d, psi, t), 1e-9);
  }
}

TEST(Boundary, FluxTriviality) {
  // On the left boundary phibar0 and phi1 differ by an orientation constant.
  const double alpha = 1.1, nu = 0.2;
  const Domain d = light_cone(Model::Dense, 2, 2, alpha, 1);
  const AngleDictionary lc = AngleDictionary::light_cone(Model::Dense, nu, alpha, 0.6);
  const auto f = loop_fields(d, lc, {ObsKind::Phi1, ObsKind::Phi0bar});
  const cplx slanted = std::exp(-2.0 * kI * alpha * (1.0 - 2.0 * nu));
  int checked = 0;
  for (int t = 1; t <= d.lc_T(); ++t) {
    const int e = d.lc_edge(t, 1);
    const cplx a = f.at(ObsKind::Phi0bar).at(e), b = f.at(ObsKind::Phi1).at(e);
    if (std::abs(b) < 1e-9) continue;
    const cplx expect = d.edges[e].kind == EdgeKind::Slanted ? slanted : cplx(1.0);
    EXPECT_NEAR(std::abs(a / b - expect), 0.0, 1e-9) << edge_label(d.edges[e]);
    ++checked;
  }
  EXPECT_GT(checked, 2);
}

TEST(Conservation, GridGenerators) {
  const double alpha = 1.1;
  const Domain d = rhombic_grid(Model::Dense, 2, 2, alpha, {1, 2});
  const AngleDictionary g = AngleDictionary::grid(Model::Dense, 0.2, alpha, cplx(0, 0.2));
  const VertexNetwork net = build_network(d, g, VertexSource::Algebraic);
  for (Gen a : {Gen::E0, Gen::E1, Gen::Ebar0, Gen::Ebar1})
    for (int c : d.bulk_cells())
      EXPECT_LT(std::abs(conservation_residual(net, CurrentInsertion::generator(a, 0), c)), 1e-9) << gen_name(a);
}

TEST(Conservation, LightConeBoundaryCharge) {
  const double alpha = 1.1;
  const Domain d = light_cone(Model::Dense, 2, 2, alpha, 1);
  const AngleDictionary lc = AngleDictionary::light_cone(Model::Dense, 0.2, alpha, cplx(0.5, 0.3));
  const VertexNetwork net = build_network(d, lc, VertexSource::Algebraic);
  const CoidealSpec c = lc.coideal();
  double e1_boundary = 0.0;
  for (std::size_t ci = 0; ci < d.cells.size(); ++ci) {
    const CellKind k = d.cells[ci].kind;
    if (k != CellKind::Bulk && k != CellKind::KLeft) continue;
    const int cell = static_cast<int>(ci);
    EXPECT_LT(std::abs(conservation_residual(net, CurrentInsertion::composite("Q", c.Q, 0), cell)), 1e-9);
    EXPECT_LT(local_flux_violation(net, cell), 1e-9);
    const double e1 = std::abs(conservation_residual(net, CurrentInsertion::generator(Gen::E1, 0), cell));
    if (k == CellKind::Bulk) EXPECT_LT(e1, 1e-9);
    else e1_boundary = std::max(e1_boundary, e1);
  }
  EXPECT_GT(e1_boundary, 1e-3);
}

TEST(Charges, CartanCommuteE1DoesNot) {
  const AngleDictionary lc = AngleDictionary::light_cone(Model::Dense, 0.2, 1.1, 0.5);
  const FormalSum t0 = {{1.0, {Gen::T0}}}, t1 = {{1.0, {Gen::T1}}}, e1 = {{1.0, {Gen::E1}}};
  EXPECT_LT(charge_commutation(lc, 4, t0).norm, 1e-9);
  EXPECT_LT(charge_commutation(lc, 4, t1).norm, 1e-9);
  EXPECT_GT(charge_commutation(lc, 4, e1).norm, 1e-3);
  const AngleDictionary free = AngleDictionary::light_cone(Model::Dense, 0.2, 1.1, 0.0);
  EXPECT_LT(charge_commutation(free, 4, free.coideal().Q).norm, 1e-9);
  EXPECT_LT(charge_commutation(free, 2, e1).norm, 1e-9);
}

TEST(AdjointObservable, DirectIdentityAndDressedConstant) {
  const double nu = -0.2, alpha = 1.1;
  const AngleDictionary lc = AngleDictionary::light_cone(Model::Dilute, nu, alpha);
  const Domain d = light_cone(Model::Dilute, 2, 1, alpha, 1);
  int nonzero = 0;
  for (const auto& e : d.edges) {
    if (e.lc_t < 1) continue;
    const AdjointResult a = adjoint_observable(d, lc, e.id);
    EXPECT_LT(a.rel_direct, 1e-9) << edge_label(e);
    if (std::abs(a.phi0) > 1e-9) {
      EXPECT_LT(a.rel_dressed, 1e-8) << edge_label(e);
      ++nonzero;
    }
  }
  EXPECT_GT(nonzero, 0);
  const cplx c = adjoint_constant_dressed(lc);
  EXPECT_NEAR(std::abs(c - (-std::pow(lc.q, -4) * std::exp(kI * nu * (alpha - kPi)))), 0.0, 1e-14);
}

TEST(Continuum, KacOracleAndObservables) {
  // Independent Kac table: h_rs = ((r - s g)^2 - (1 - g)^2) / (4 g).
  auto kac_oracle = [](double r, double s, double g) { return (std::pow(r - s * g, 2) - std::pow(1 - g, 2)) / (4 * g); };
  for (double nu = 0.03; nu < 0.5; nu += 0.047) {
    const double g = 1 - 2 * nu;
    EXPECT_NEAR(dense_phi0_dimensions(nu).h, 2 * g - 1, 1e-12);
    EXPECT_NEAR(dense_phi0_dimensions(nu).h, kac_oracle(1, 3, g), 1e-12);
    EXPECT_NEAR(dense_phi1_dimensions(nu).h, 1.0, 1e-12);
    EXPECT_NEAR(kac(1, 3, g), kac_oracle(1, 3, g), 1e-14);
  }
  for (double nu = -0.47; nu < 0.0; nu += 0.047) {
    const double g = 1 - 2 * nu;
    EXPECT_NEAR(dilute_phi0_dimensions(nu).h, (3 * g - 2) / 4, 1e-12);
    EXPECT_NEAR(dilute_phi0_dimensions(nu).h, kac_oracle(1, 2, g), 1e-12);
  }
}

TEST(Continuum, Errors) {
  EXPECT_THROW(continuum_dimensions(0.0, 1.0, 0, 0.1), NonPositiveCoupling);
  EXPECT_THROW(continuum_dimensions(-0.5, 1.0, 0, 0.1), NonPositiveCoupling);
  EXPECT_THROW(kac(1, 2, -1.0), NonPositiveCoupling);
  EXPECT_THROW(coupling(Model::Dense, 0.6), InconsistentParams);
  EXPECT_THROW(coupling(Model::Dilute, 0.2), InconsistentParams);
  const ContinuumData c = continuum_dimensions(0.6, 0.0, 0, background_charge(0.6));
  EXPECT_NEAR(c.h, 0.0, 1e-15);
  EXPECT_NEAR(c.hbar, 0.0, 1e-15);
}

TEST(Json, FieldsAreDeterministic) {
  const double alpha = 1.1;
  const Domain d = rhombic_grid(Model::Dense, 2, 2, alpha, {1, 2});
  const AngleDictionary g = AngleDictionary::grid(Model::Dense, 0.2, alpha);
  const auto f = loop_fields(d, g, {ObsKind::Phi1});
  Report r;
  r.add("dh", "all", max_dh_residual(d, f.at(ObsKind::Phi1)), 1e-9);
  const auto a = observables_json(d, g, {f.at(ObsKind::Phi1)}, r).dump();
  const auto b = observables_json(d, g, {loop_fields(d, g, {ObsKind::Phi1}).at(ObsKind::Phi1)}, r).dump();
  EXPECT_EQ(a, b);
  const auto j = nlohmann::json::parse(a);
  EXPECT_EQ(j["model"], "dense");
  EXPECT_EQ(j["fields"].size(), d.edges.size());
  EXPECT_TRUE(j["residuals"][0]["pass"].get<bool>());
  EXPECT_EQ(j["residuals"][0]["tol"].get<double>(), 1e-9);
}

TEST(Errors, MissingValuesAndBadCells) {
  ObservableField f;
  EXPECT_THROW(f.at(3), MissingValue);
  const Domain d = rhombic_grid(Model::Dense, 1, 1, 1.0);
  EXPECT_THROW(dh_residual(d, f, 99), PositionOutOfRange);
  EXPECT_THROW(left_boundary_slices(d), InconsistentParams);
}
