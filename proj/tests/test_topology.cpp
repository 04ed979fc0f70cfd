#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace tetforge;
using namespace tetforge::testing;

TEST(Topology, SingleTetAllCorners) {
  TetMesh m = single_tet_mesh(corner_tet());
  const auto adj = build_topology(m);
  EXPECT_EQ(m.surface_tris.size(), 4u);
  for (auto c : m.vertex_class) EXPECT_EQ(c, VertexClass::Corner);
  for (Index o : adj.tri_owner) EXPECT_EQ(o, 0);
}

TEST(Topology, CubeClassification) {
  const int n = 4;
  TetMesh m = generate_test_mesh({FixtureKind::Grid, n, 0, 0.0}, 0);
  const auto adj = build_topology(m, 30.0);
  EXPECT_EQ(m.surface_tris.size(), static_cast<std::size_t>(6 * 2 * n * n));
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    const Vec3& p = m.vertices[v];
    int on = 0;
    for (int a = 0; a < 3; ++a) on += (p[a] < 1e-12 || p[a] > 1 - 1e-12) ? 1 : 0;
    const VertexClass want = on == 0   ? VertexClass::Interior
                             : on == 1 ? VertexClass::SurfaceSmooth
                             : on == 2 ? VertexClass::FeatureEdge
                                       : VertexClass::Corner;
    EXPECT_EQ(m.vertex_class[v], want) << "vertex " << v;
    if (on == 0) {
      EXPECT_TRUE(adj.vertex_tris[v].empty());
    }
  }
}

TEST(Topology, SurfaceIsOutwardAndClosed) {
  TetMesh m = generate_test_mesh({FixtureKind::Grid, 3, 0, 0.2}, 3);
  build_topology(m);
  for (const auto& t : m.surface_tris) {
    const Vec3 c = (m.vertices[t[0]] + m.vertices[t[1]] + m.vertices[t[2]]) / 3.0;
    const Vec3 n = triangle_area_vector(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
    EXPECT_GT(n.dot(c - Vec3(0.5, 0.5, 0.5)), 0.0);
  }
}

TEST(Topology, UserFixedPreserved) {
  TetMesh m = generate_test_mesh({FixtureKind::Grid, 2, 0, 0.0}, 0);
  m.vertex_ref[13] = 9;  // centre vertex
  fix_vertices_by_ref(m, {9});
  build_topology(m);
  EXPECT_EQ(m.vertex_class[13], VertexClass::UserFixed);
  EXPECT_TRUE(m.is_fixed(13));
}

TEST(Topology, NonManifoldFaceThrows) {
  TetMesh m = single_tet_mesh(corner_tet());
  m.vertices.emplace_back(0.3, 0.3, 0.3);
  m.vertices.emplace_back(-1, -1, -1);
  m.tets.push_back({1, 2, 3, 4});
  m.tets.push_back({1, 2, 3, 5});
  m.fill_attributes();
  EXPECT_THROW(build_topology(m), StructuralError);
}

TEST(Topology, ClusterNormals) {
  int groups = 0;
  const std::vector<Vec3> n{Vec3(0, 0, 1), Vec3(0, 0.1, 1), Vec3(1, 0, 0), Vec3(1, 0.05, 0)};
  const auto g = cluster_normals(n, 30.0, &groups);
  EXPECT_EQ(groups, 2);
  EXPECT_EQ(g[0], g[1]);
  EXPECT_EQ(g[2], g[3]);
  EXPECT_NE(g[0], g[2]);
}
