#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "tetforge/error.hpp"
#include "tetforge/geometry.hpp"

namespace tetforge {

using Index = std::int32_t;
using Tet = std::array<Index, 4>;
using Tri = std::array<Index, 3>;

enum class VertexClass : std::uint8_t {
  Interior,
  SurfaceSmooth,
  FeatureEdge,  // on a crease: incident surface normals form two groups
  Corner,
  UserFixed,
};

inline const char* to_string(VertexClass c) {
  switch (c) {
    case VertexClass::Interior: return "interior";
    case VertexClass::SurfaceSmooth: return "surface";
    case VertexClass::FeatureEdge: return "feature-edge";
    case VertexClass::Corner: return "corner";
    case VertexClass::UserFixed: return "fixed";
  }
  return "?";
}

/// Linear tetrahedral mesh. Indices are 0-based. Inverted and flat tets are
/// representable; nothing here assumes positive volume.
struct TetMesh {
  std::vector<Vec3> vertices;
  std::vector<Tet> tets;
  /// Oriented with outward normal by the right-hand rule.
  std::vector<Tri> surface_tris;
  std::vector<VertexClass> vertex_class;

  // Reference tags carried through file I/O (Medit "ref" columns).
  std::vector<int> vertex_ref;
  std::vector<int> tet_ref;
  std::vector<int> tri_ref;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_tets() const { return tets.size(); }

  std::array<Vec3, 4> tet_points(std::size_t t) const {
    const Tet& c = tets[t];
    return {vertices[c[0]], vertices[c[1]], vertices[c[2]], vertices[c[3]]};
  }

  double tet_volume(std::size_t t) const { return tet_signed_volume(tet_points(t)); }

  /// Sizes the per-entity attribute arrays to match the geometry, filling
  /// with Interior / ref 0.
  void fill_attributes() {
    vertex_class.resize(vertices.size(), VertexClass::Interior);
    vertex_ref.resize(vertices.size(), 0);
    tet_ref.resize(tets.size(), 0);
    tri_ref.resize(surface_tris.size(), 0);
  }

  bool is_fixed(Index v) const {
    const auto c = vertex_class[v];
    return c == VertexClass::Corner || c == VertexClass::UserFixed;
  }
};

/// Checks the connectivity invariants: indices in range, distinct per
/// element, finite coordinates and volumes.
inline void validate(const TetMesh& m) {
  const auto nv = static_cast<Index>(m.vertices.size());
  for (std::size_t v = 0; v < m.vertices.size(); ++v)
    if (!m.vertices[v].allFinite())
      throw StructuralError("vertex " + std::to_string(v) + " has non-finite coordinates");
  for (std::size_t t = 0; t < m.tets.size(); ++t) {
    const Tet& c = m.tets[t];
    for (Index i : c)
      if (i < 0 || i >= nv)
        throw StructuralError("tet " + std::to_string(t) + " references vertex " +
                              std::to_string(i) + " out of range");
    if (std::set<Index>(c.begin(), c.end()).size() != 4)
      throw StructuralError("tet " + std::to_string(t) + " has repeated vertices");
    if (!std::isfinite(m.tet_volume(t)))
      throw StructuralError("tet " + std::to_string(t) + " has non-finite volume");
  }
  for (std::size_t f = 0; f < m.surface_tris.size(); ++f) {
    const Tri& c = m.surface_tris[f];
    for (Index i : c)
      if (i < 0 || i >= nv)
        throw StructuralError("triangle " + std::to_string(f) + " references vertex " +
                              std::to_string(i) + " out of range");
    if (c[0] == c[1] || c[1] == c[2] || c[0] == c[2])
      throw StructuralError("triangle " + std::to_string(f) + " has repeated vertices");
  }
  if (!m.vertex_class.empty() && m.vertex_class.size() != m.vertices.size())
    throw StructuralError("vertex classification size does not match vertex count");
}

}  // namespace tetforge
