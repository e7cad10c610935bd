#include <map>
#include <set>

#include "qloop/errors.hpp"
#include "qloop/loopmodel.hpp"
#include "test_util.hpp"

using namespace qloop;

namespace {

std::vector<LoopConfig> all_configs(const Domain& d) {
  std::vector<LoopConfig> out;
  enumerate_configs(d, [&](const LoopConfig& c) { out.push_back(c); });
  return out;
}

double wrap(double a) { return std::remainder(a, 2 * kPi); }

}  // namespace

TEST(Lattice, GridEdgeBookkeeping) {
  const Domain d = rhombic_grid(Model::Dense, 2, 3, 1.0);
  EXPECT_EQ(d.bulk_count(), 6);
  EXPECT_EQ(d.perimeter.size(), 10u);
  int horizontal = 0;
  for (const auto& e : d.edges) {
    horizontal += e.kind == EdgeKind::Horizontal;
    EXPECT_GE(d.edge_cells[e.id].first, 0);
    EXPECT_GE(d.edge_cells[e.id].second, 0);
  }
  EXPECT_EQ(horizontal, 2 * 4);
  EXPECT_EQ(static_cast<int>(d.edges.size()) - horizontal, 3 * 3);
}

TEST(Lattice, GridRejectsBadDefects) {
  EXPECT_THROW(rhombic_grid(Model::Dense, 3, 2, 1.0, {1}), InconsistentParams);
  EXPECT_THROW(rhombic_grid(Model::Dense, 3, 2, 1.0, {1, 3}), InconsistentParams);
  EXPECT_THROW(rhombic_grid(Model::Dense, 3, 2, 1.0, {0, 1}), PositionOutOfRange);
  EXPECT_THROW(rhombic_grid(Model::Dense, 2, 2, 0.0), InconsistentParams);
  EXPECT_THROW(rhombic_grid(Model::Dense, 2, 2, kPi), InconsistentParams);
  EXPECT_NO_THROW(rhombic_grid(Model::Dilute, 2, 2, 1.0, {2}));
}

TEST(Lattice, LightConeSites) {
  EXPECT_THROW(light_cone(Model::Dense, 3, 1, 1.0), InconsistentParams);
  const Domain d = light_cone(Model::Dense, 4, 2, 1.2, 1);
  for (int t = 0; t <= d.lc_T(); ++t)
    for (int x = 1; x <= d.L; ++x) {
      const Edge& e = d.edges[d.lc_edge(t, x)];
      EXPECT_EQ(e.kind == EdgeKind::Slanted, (x + t) % 2 == 0);
      EXPECT_EQ(e.lc_t, t);
      EXPECT_EQ(e.lc_x, x);
    }
  EXPECT_EQ(d.defects.size(), 2u);
  EXPECT_THROW(d.lc_edge(0, 5), PositionOutOfRange);
}

TEST(Enumerate, ConfigurationCounts) {
  EXPECT_EQ(all_configs(rhombic_grid(Model::Dense, 1, 1, 1.0)).size(), 2u);
  EXPECT_EQ(all_configs(rhombic_grid(Model::Dense, 2, 2, 1.0)).size(), 16u);
  const Domain d = rhombic_grid(Model::Dilute, 1, 2, 1.0);
  std::set<std::vector<TileKind>> bulk;
  for (const auto& c : all_configs(d)) {
    std::vector<TileKind> b;
    for (int ci : d.bulk_cells()) b.push_back(c.tiles[ci]);
    bulk.insert(b);
  }
  EXPECT_EQ(bulk.size(), 81u);
}

TEST(Enumerate, CapacityIsEnforced) {
  const Domain d = rhombic_grid(Model::Dense, 5, 5, 1.0);
  EXPECT_THROW(enumerate_configs(d, [](const LoopConfig&) {}), CapacityExceeded);
}

TEST(Trace, LoopCountAgreesWithUnionFind) {
  for (const Domain& d : {rhombic_grid(Model::Dense, 3, 3, 1.1), rhombic_grid(Model::Dense, 2, 3, 0.7, {1, 2}),
                          rhombic_grid(Model::Dilute, 2, 2, 1.1)}) {
    for (const auto& c : all_configs(d)) {
      const Trace tr = trace(c);
      if (!tr.valid) continue;
      EXPECT_EQ(static_cast<int>(tr.loops.size()), count_loops_union_find(c));
    }
  }
}

TEST(Trace, ClosedLoopsTurnByFullCircle) {
  for (const Domain& d : {rhombic_grid(Model::Dense, 3, 3, 0.8), rhombic_grid(Model::Dilute, 2, 2, 2.0)})
    for (const auto& c : all_configs(d)) {
      const Trace tr = trace(c);
      if (!tr.valid) continue;
      for (const Turn& t : tr.loops) EXPECT_NEAR(std::abs(t.geo), 2 * kPi, 1e-12);
    }
}

TEST(Weight, TileProductTimesLoopFugacity) {
  const double nu = 0.23;
  const cplx q = dense_q(nu), x{0.7, 0.4};
  const LoopWeights w = LoopWeights::dense(nu, q, x);
  const cplx a = q * x - 1.0 / (q * x), b = x - 1.0 / x;
  const Domain d = rhombic_grid(Model::Dense, 2, 2, 1.0);
  for (const auto& c : all_configs(d)) {
    const Trace tr = trace(c);
    ASSERT_TRUE(tr.valid);
    cplx expect = std::pow(dense_tau(q), static_cast<double>(tr.loops.size()));
    for (int ci : d.bulk_cells()) expect *= c.tiles[ci] == TileKind::A ? a : b;
    EXPECT_NEAR(std::abs(config_weight(c, tr, w) - expect), 0.0, 1e-12 * std::abs(expect));
  }
  EXPECT_NEAR(std::abs(dense_tau(q) - 2.0 * std::cos(2 * kPi * nu)), 0.0, 1e-14);
}

TEST(Weight, DiluteLoopFugacity) {
  const double nu = -0.3;
  EXPECT_NEAR(std::abs(dilute_tau(dilute_q(nu)) - 2.0 * std::cos(2 * kPi * nu)), 0.0, 1e-14);
  const auto f = dilute_weight_formulas(dilute_q(nu), 1.0);
  // x = 1: only the identity-like tiles survive.
  EXPECT_NEAR(std::abs(f[2]), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(f[3]), 0.0, 1e-14);
}

TEST(Weight, BoundaryFugacitySign) {
  const double nu = 0.2;
  const cplx xi{0.3, 0.1};
  for (int n = 1; n <= 3; ++n) {
    const cplx reference = -(std::exp(kI * nu * (2 * kPi - double(n) * xi)) + std::exp(-kI * nu * (2 * kPi - double(n) * xi)));
    EXPECT_NEAR(std::abs(tau_boundary_reference(nu, xi, n) - reference), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(tau_boundary(nu, xi, n) + reference), 0.0, 1e-14);
  }
}

TEST(Winding, StartAndQuantisation) {
  const double alpha = 0.9;
  const Domain d = rhombic_grid(Model::Dense, 2, 3, alpha, {1, 2});
  std::map<int, int> parity;
  for (const auto& c : all_configs(d)) {
    const Trace tr = trace(c);
    ASSERT_TRUE(tr.valid);
    ASSERT_EQ(tr.paths.size(), 1u);
    const PathGeometry g0 = winding(c, tr, tr.paths[0].steps.front().edge);
    EXPECT_NEAR(g0.theta, 0.0, 1e-12);
    EXPECT_EQ(g0.k, 0);
    for (const auto& step : tr.paths[0].steps) {
      const PathGeometry g = winding(c, tr, step.edge);
      const bool slanted = d.edges[step.edge].kind == EdgeKind::Slanted;
      const double base = g.theta + g.start_offset + (slanted ? alpha : 0.0);
      EXPECT_NEAR(wrap(base - g.k * kPi), 0.0, 1e-12);
      if (!slanted) {
        auto [it, fresh] = parity.emplace(step.edge, ((g.k % 2) + 2) % 2);
        if (!fresh) EXPECT_EQ(it->second, ((g.k % 2) + 2) % 2) << edge_label(d.edges[step.edge]);
      }
    }
  }
  EXPECT_FALSE(parity.empty());
}

TEST(Names, TileRoundTrip) {
  for (TileKind k : {TileKind::A, TileKind::B, TileKind::U1a, TileKind::W2, TileKind::KArc, TileKind::DefectOff}) {
    auto back = tile_from_name(tile_name(k));
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(*back, k);
  }
  EXPECT_FALSE(tile_from_name("nope").has_value());
}
