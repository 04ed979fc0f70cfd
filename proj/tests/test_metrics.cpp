#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace tetforge;
using namespace tetforge::testing;

TEST(Metrics, CubeVolumeAndArea) {
  TetMesh m = cube6();
  ASSERT_EQ(m.tets.size(), 6u);
  const auto adj = build_topology(m);
  const auto g = global_metrics(m, adj);
  EXPECT_NEAR(g.total_volume, 1.0, 1e-14);
  EXPECT_NEAR(g.total_surface_area, 6.0, 1e-14);
  EXPECT_EQ(g.inverted, 0u);
}

TEST(Metrics, RegularTetHistogram) {
  TetMesh m = single_tet_mesh(regular_tet());
  const auto adj = build_topology(m);
  const auto g = global_metrics(m, adj);
  for (int b = 0; b < kHistogramBins; ++b) EXPECT_EQ(g.histogram[b], b == 7 ? 6u : 0u) << b;
  EXPECT_NEAR(g.q_min, 1.0, 1e-12);
}

TEST(Metrics, HistogramEdges) {
  EXPECT_EQ(histogram_bin(0.0), 0);
  EXPECT_EQ(histogram_bin(9.999), 0);
  EXPECT_EQ(histogram_bin(10.0), 1);
  EXPECT_EQ(histogram_bin(180.0), kHistogramBins - 1);
}

TEST(Metrics, InvertedTetGivesNegativeQuality) {
  TetMesh m = generate_test_mesh({FixtureKind::WithInverted, 3, 1, 0.0}, 5);
  const auto adj = build_topology(m);
  const auto g = global_metrics(m, adj);
  EXPECT_LT(g.q_min, 0.0);
  EXPECT_EQ(g.inverted, 1u);
}

TEST(Metrics, SurfaceIntegralMatchesTetSum) {
  for (const char* spec : {"grid:4:0.3", "sphere:6", "slivers:4:2", "inverted:4:2"}) {
    TetMesh m = generate_test_mesh(parse_fixture_spec(spec), 2);
    build_topology(m);
    const double a = surface_integral_volume(m), b = total_volume(m);
    EXPECT_LE(std::abs(a - b), 1e-10 * std::abs(b)) << spec;
  }
}
