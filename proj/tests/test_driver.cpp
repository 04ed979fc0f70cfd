#include <gtest/gtest.h>

#include <set>

#include "test_support.hpp"

using namespace tetforge;
using namespace tetforge::testing;

TEST(Driver, GoodMeshIsLeftAlone) {
  TetMesh m = generate_test_mesh({FixtureKind::Grid, 3, 0, 0.0}, 0);
  const auto before = m.vertices;
  const auto rep = optimize_mesh(m, {});
  EXPECT_LE(rep.passes.size(), 1u);
  EXPECT_EQ(m.vertices, before);
  EXPECT_EQ(rep.volume_drift_percent, 0.0);
}

TEST(Driver, PerturbedGridImproves) {
  TetMesh m = generate_test_mesh(parse_fixture_spec("grid:5:0.4"), 3);
  const auto rep = optimize_mesh(m, {});
  ASSERT_FALSE(rep.passes.empty());
  EXPECT_GT(rep.final.min_dihedral, rep.initial.min_dihedral);
  EXPECT_GT(rep.final.q_min, rep.initial.q_min);
  EXPECT_LE(rep.volume_drift_percent, 0.01);
  EXPECT_EQ(rep.final.inverted, 0u);
}

TEST(Driver, GammaRefreshedEachPass) {
  TetMesh m = generate_test_mesh(parse_fixture_spec("slivers:5:3"), 6);
  RunConfig cfg;
  cfg.target_quality = 0.6;
  std::vector<PassRecord> passes;
  RunHooks hooks;
  hooks.on_pass = [&](const PassRecord& r) { passes.push_back(r); };
  const auto rep = optimize_mesh(m, cfg, hooks);
  ASSERT_GE(passes.size(), 2u);
  EXPECT_EQ(passes.size(), rep.passes.size());
  for (std::size_t i = 0; i < passes.size(); ++i) {
    const auto& r = passes[i];
    EXPECT_DOUBLE_EQ(r.gamma, compute_gamma(r.q_min_start, r.b));
    EXPECT_GE(r.q_min, r.q_min_start);  // non-decreasing at fixed b
    if (i > 0) {
      EXPECT_DOUBLE_EQ(r.q_min_start, passes[i - 1].q_min);
    }
  }
}

TEST(Driver, NoInvertedElementAtAnyAcceptedStep) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    TetMesh m = generate_test_mesh(parse_fixture_spec("grid:4:0.45"), seed);
    ASSERT_EQ(count_inverted(m), 0u);
    std::size_t steps = 0, bad = 0;
    RunHooks hooks;
    hooks.on_step = [&](const TetMesh& mm, const Patch& p) {
      ++steps;
      for (Index t : p.ring_tets) bad += mm.tet_volume(t) <= 0.0 ? 1 : 0;
    };
    optimize_mesh(m, {}, hooks);
    EXPECT_GT(steps, 0u);
    EXPECT_EQ(bad, 0u);
    EXPECT_EQ(count_inverted(m), 0u);
  }
}

TEST(Driver, NoSurfaceMotionKeepsBoundaryExactly) {
  TetMesh m = generate_test_mesh(parse_fixture_spec("sphere:6:0.3"), 1);
  RunConfig cfg;
  cfg.surface_motion = false;
  AdjacencyIndex adj;
  const TetMesh before = m;
  const auto rep = optimize_mesh(m, cfg, {}, &adj);
  ASSERT_FALSE(rep.passes.empty());
  EXPECT_EQ(rep.volume_drift_percent, 0.0);
  for (std::size_t v = 0; v < m.vertices.size(); ++v)
    if (m.vertex_class[v] != VertexClass::Interior) {
      EXPECT_EQ(m.vertices[v], before.vertices[v]);
    }
}

TEST(Driver, UntanglesInvertedFixture) {
  TetMesh m = generate_test_mesh(parse_fixture_spec("inverted:4:2"), 0);
  ASSERT_EQ(count_inverted(m), 2u);
  RunConfig cfg;
  cfg.max_passes = 50;
  const auto rep = optimize_mesh(m, cfg);
  EXPECT_LT(rep.initial.q_min, 0.0);
  EXPECT_GT(rep.final.q_min, 0.0);
  EXPECT_EQ(count_inverted(m), 0u);
}

TEST(Driver, ParallelDispatchKeepsInvariants) {
  TetMesh m = generate_test_mesh(parse_fixture_spec("slivers:6:4:0.3"), 2);
  RunConfig cfg;
  cfg.jobs = 3;
  const double q0 = min_quality(m);
  const auto rep = optimize_mesh(m, cfg);
  EXPECT_GT(rep.final.q_min, q0);
  EXPECT_EQ(count_inverted(m), 0u);
  EXPECT_LE(rep.volume_drift_percent, 0.01);
}

TEST(Driver, ColoringSeparatesConflictingPatches) {
  TetMesh m = generate_test_mesh(parse_fixture_spec("grid:4:0.3"), 0);
  const auto adj = build_topology(m);
  const auto patches = select_patches(m, adj, 0.3, PatchMode::AllPatches, {true, 6});
  const auto classes = detail::color_patches(m, patches);
  std::vector<int> owner(m.vertices.size(), -1);
  for (std::size_t p = 0; p < patches.size(); ++p)
    for (Index v : patches[p].free_vertices) owner[v] = static_cast<int>(p);
  std::size_t total = 0;
  for (const auto& cls : classes) {
    total += cls.size();
    std::set<std::size_t> members(cls.begin(), cls.end());
    for (std::size_t p : cls)
      for (Index t : patches[p].ring_tets)
        for (Index v : m.tets[t])
          if (owner[v] >= 0 && owner[v] != static_cast<int>(p)) {
            EXPECT_FALSE(members.count(owner[v]));
          }
  }
  EXPECT_EQ(total, patches.size());
}

TEST(Driver, SquaredObjectiveAlsoImproves) {
  TetMesh m = generate_test_mesh(parse_fixture_spec("slivers:4:2"), 1);
  RunConfig cfg;
  cfg.objective = ObjectiveKind::SquaredLogBarrier;
  const auto rep = optimize_mesh(m, cfg);
  EXPECT_GT(rep.final.q_min, rep.initial.q_min);
  EXPECT_EQ(rep.final.inverted, 0u);
}

TEST(Driver, RejectsBadConfig) {
  TetMesh m = cube6();
  RunConfig cfg;
  cfg.b_schedule = {0.9, 0.8};
  EXPECT_THROW(optimize_mesh(m, cfg), InvalidArgument);
  cfg.b_schedule = {1.0};
  EXPECT_THROW(optimize_mesh(m, cfg), InvalidArgument);
}
