#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_support.hpp"

using namespace tetforge;
using namespace tetforge::testing;

namespace {

const char* kSingleTet =
    "MeshVersionFormatted 2\n"
    "Dimension 3\n"
    "Vertices\n4\n"
    "0 0 0 0\n1 0 0 0\n0 1 0 0\n0 0 1 0\n"
    "Tetrahedra\n1\n"
    "1 2 3 4 7\n"
    "End\n";

void expect_same(const TetMesh& a, const TetMesh& b) {
  ASSERT_EQ(a.vertices.size(), b.vertices.size());
  for (std::size_t i = 0; i < a.vertices.size(); ++i) EXPECT_EQ(a.vertices[i], b.vertices[i]) << i;
  EXPECT_EQ(a.tets, b.tets);
  EXPECT_EQ(a.surface_tris, b.surface_tris);
  EXPECT_EQ(a.vertex_ref, b.vertex_ref);
  EXPECT_EQ(a.tet_ref, b.tet_ref);
  EXPECT_EQ(a.tri_ref, b.tri_ref);
}

TetMesh jittered_cube_with_surface() {
  TetMesh m = generate_test_mesh({FixtureKind::Grid, 3, 0, 0.3}, 11);
  build_topology(m);
  m.vertices[0] += Vec3(1e-17, 0.1 / 3.0, -2.0 / 7.0);  // digits that need all 17
  for (std::size_t i = 0; i < m.vertex_ref.size(); ++i) m.vertex_ref[i] = static_cast<int>(i % 3);
  for (std::size_t i = 0; i < m.tet_ref.size(); ++i) m.tet_ref[i] = static_cast<int>(i % 5);
  return m;
}

}  // namespace

TEST(MeshIo, ReadsSingleTet) {
  std::istringstream in(kSingleTet);
  const TetMesh m = read_medit(in);
  EXPECT_EQ(m.vertices.size(), 4u);
  ASSERT_EQ(m.tets.size(), 1u);
  EXPECT_EQ(m.tets[0], (Tet{0, 1, 2, 3}));
  EXPECT_EQ(m.tet_ref[0], 7);
}

TEST(MeshIo, OutOfRangeIndexReportsLine) {
  std::string text = kSingleTet;
  text.replace(text.find("1 2 3 4 7"), 9, "1 2 3 5 7");
  std::istringstream in(text);
  try {
    read_medit(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 11u);
  }
}

TEST(MeshIo, RejectsGarbage) {
  std::istringstream in("MeshVersionFormatted 2\nDimension 3\nVertices\n2\n0 0 zero 0\n");
  EXPECT_THROW(read_medit(in), ParseError);
}

TEST(MeshIo, WritesSingleTetWithoutTriangles) {
  const TetMesh m = single_tet_mesh(corner_tet());
  std::ostringstream out;
  write_medit(out, m);
  const std::string s = out.str();
  EXPECT_NE(s.find("Vertices\n4\n"), std::string::npos);
  EXPECT_NE(s.find("Tetrahedra\n1\n"), std::string::npos);
  EXPECT_EQ(s.find("Triangles"), std::string::npos);
}

TEST(MeshIo, MeditRoundTrip) {
  const TetMesh m = jittered_cube_with_surface();
  std::ostringstream out;
  write_medit(out, m);
  std::istringstream in(out.str());
  expect_same(read_medit(in), m);
}

TEST(MeshIo, VtkRoundTrip) {
  const TetMesh m = jittered_cube_with_surface();
  std::ostringstream out;
  write_vtk(out, m);
  std::istringstream in(out.str());
  expect_same(read_vtk(in), m);
}

TEST(MeshIo, SaveLoadFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "tetforge_io_test";
  std::filesystem::create_directories(dir);
  const TetMesh m = jittered_cube_with_surface();
  for (const char* name : {"cube.mesh", "cube.vtk"}) {
    const auto path = dir / name;
    save_mesh(m, path, *format_from_path(path));
    expect_same(load_mesh(path), m);
    EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  }
  std::filesystem::remove_all(dir);
}

TEST(MeshIo, MissingFileIsIoError) {
  EXPECT_THROW(load_mesh("/nonexistent/dir/none.mesh"), IoError);
}
