#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "tetforge/error.hpp"
#include "tetforge/mesh.hpp"

namespace tetforge {

/// Vertex-to-element incidence plus the surface normal grouping used for
/// vertex classification. Built once per mesh connectivity.
struct AdjacencyIndex {
  std::vector<std::vector<Index>> vertex_tets;
  std::vector<std::vector<Index>> vertex_tris;
  /// Parallel to vertex_tris: normal-cluster label of each incident triangle.
  std::vector<std::vector<std::uint8_t>> tri_group;
  /// Owning tet of each surface triangle, -1 for internal triangles shared by two tets.
  std::vector<Index> tri_owner;
  double feature_angle_deg = 30.0;
  /// Bounding-box diagonal; the length scale for relative tolerances.
  double scale = 1.0;
};

namespace detail {

struct FaceRecord {
  std::array<Index, 3> key;  // sorted vertex ids
  Index tet;
  std::int8_t local;  // face index into kTetFaces
};

inline std::vector<FaceRecord> sorted_faces(const TetMesh& m) {
  std::vector<FaceRecord> faces;
  faces.reserve(4 * m.tets.size());
  for (std::size_t t = 0; t < m.tets.size(); ++t) {
    for (int f = 0; f < 4; ++f) {
      std::array<Index, 3> k{m.tets[t][kTetFaces[f][0]], m.tets[t][kTetFaces[f][1]],
                             m.tets[t][kTetFaces[f][2]]};
      std::sort(k.begin(), k.end());
      faces.push_back({k, static_cast<Index>(t), static_cast<std::int8_t>(f)});
    }
  }
  std::sort(faces.begin(), faces.end(), [](const FaceRecord& a, const FaceRecord& b) {
    return a.key != b.key ? a.key < b.key : a.tet < b.tet;
  });
  return faces;
}

/// Face `local` of tet `t`, wound so its normal points away from the tet.
inline Tri outward_face(const TetMesh& m, Index t, int local) {
  const Tet& c = m.tets[t];
  Tri tri{c[kTetFaces[local][0]], c[kTetFaces[local][1]], c[kTetFaces[local][2]]};
  if (m.tet_volume(t) < 0.0) std::swap(tri[1], tri[2]);
  return tri;
}

inline double bbox_diagonal(const TetMesh& m) {
  if (m.vertices.empty()) return 1.0;
  Vec3 lo = m.vertices.front(), hi = lo;
  for (const auto& p : m.vertices) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double d = (hi - lo).norm();
  return d > 0.0 ? d : 1.0;
}

}  // namespace detail

/// Greedy angular clustering of unit normals: each normal joins the first
/// group whose accumulated mean lies within `angle_deg`, otherwise starts a
/// new group. Zero normals join group 0. Returns one label per input.
inline std::vector<std::uint8_t> cluster_normals(const std::vector<Vec3>& area_normals,
                                                 double angle_deg, int* num_groups = nullptr) {
  const double cos_tol = std::cos(angle_deg * std::numbers::pi / 180.0);
  std::vector<Vec3> sums;
  std::vector<std::uint8_t> label(area_normals.size(), 0);
  for (std::size_t i = 0; i < area_normals.size(); ++i) {
    const double len = area_normals[i].norm();
    if (len == 0.0) continue;
    const Vec3 u = area_normals[i] / len;
    std::size_t g = 0;
    for (; g < sums.size(); ++g) {
      const double sl = sums[g].norm();
      if (sl > 0.0 && u.dot(sums[g]) / sl > cos_tol) break;
    }
    if (g == sums.size()) sums.push_back(Vec3::Zero());
    sums[g] += area_normals[i];
    label[i] = static_cast<std::uint8_t>(std::min<std::size_t>(g, 255));
  }
  if (num_groups) *num_groups = static_cast<int>(sums.size());
  return label;
}

/// Fills incidence, completes the surface with every boundary face (one
/// incident tet) not already listed, orients owned surface triangles outward
/// and classifies every vertex. UserFixed classifications survive.
inline AdjacencyIndex build_topology(TetMesh& mesh, double feature_angle_deg = 30.0) {
  validate(mesh);
  mesh.fill_attributes();

  AdjacencyIndex adj;
  adj.feature_angle_deg = feature_angle_deg;
  adj.scale = detail::bbox_diagonal(mesh);

  const auto faces = detail::sorted_faces(mesh);
  // Runs of equal keys: [begin, end) into `faces`.
  struct Run {
    std::size_t begin, end;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < faces.size();) {
    std::size_t j = i + 1;
    while (j < faces.size() && faces[j].key == faces[i].key) ++j;
    if (j - i > 2) {
      const auto& k = faces[i].key;
      throw StructuralError("non-manifold face (" + std::to_string(k[0]) + "," +
                            std::to_string(k[1]) + "," + std::to_string(k[2]) + ") shared by " +
                            std::to_string(j - i) + " tets");
    }
    runs.push_back({i, j});
    i = j;
  }

  if (mesh.surface_tris.empty()) {
    for (const auto& r : runs) {
      if (r.end - r.begin != 1) continue;
      const auto& f = faces[r.begin];
      mesh.surface_tris.push_back(detail::outward_face(mesh, f.tet, f.local));
      adj.tri_owner.push_back(f.tet);
    }
    mesh.tri_ref.assign(mesh.surface_tris.size(), 0);
  } else {
    adj.tri_owner.resize(mesh.surface_tris.size());
    std::vector<char> listed(runs.size(), 0);
    for (std::size_t s = 0; s < mesh.surface_tris.size(); ++s) {
      std::array<Index, 3> key = mesh.surface_tris[s];
      std::sort(key.begin(), key.end());
      const auto it = std::lower_bound(runs.begin(), runs.end(), key, [&](const Run& r, const auto& k) {
        return faces[r.begin].key < k;
      });
      if (it == runs.end() || faces[it->begin].key != key)
        throw StructuralError("surface triangle " + std::to_string(s) + " is not a face of any tet");
      if (it->end - it->begin == 1) {
        const auto& f = faces[it->begin];
        mesh.surface_tris[s] = detail::outward_face(mesh, f.tet, f.local);
        adj.tri_owner[s] = f.tet;
      } else {
        adj.tri_owner[s] = -1;  // internal surface; file orientation kept
      }
      listed[it - runs.begin()] = 1;
    }
    // Boundary faces the file did not list are appended.
    for (std::size_t r = 0; r < runs.size(); ++r) {
      if (listed[r] || runs[r].end - runs[r].begin != 1) continue;
      const auto& f = faces[runs[r].begin];
      mesh.surface_tris.push_back(detail::outward_face(mesh, f.tet, f.local));
      mesh.tri_ref.push_back(0);
      adj.tri_owner.push_back(f.tet);
    }
  }

  const std::size_t nv = mesh.vertices.size();
  adj.vertex_tets.assign(nv, {});
  adj.vertex_tris.assign(nv, {});
  adj.tri_group.assign(nv, {});
  for (std::size_t t = 0; t < mesh.tets.size(); ++t)
    for (Index v : mesh.tets[t]) adj.vertex_tets[v].push_back(static_cast<Index>(t));
  for (std::size_t s = 0; s < mesh.surface_tris.size(); ++s)
    for (Index v : mesh.surface_tris[s]) adj.vertex_tris[v].push_back(static_cast<Index>(s));

  for (std::size_t v = 0; v < nv; ++v) {
    const auto& tris = adj.vertex_tris[v];
    std::vector<Vec3> normals;
    normals.reserve(tris.size());
    for (Index s : tris) {
      const Tri& c = mesh.surface_tris[s];
      normals.push_back(triangle_area_vector(mesh.vertices[c[0]], mesh.vertices[c[1]], mesh.vertices[c[2]]));
    }
    int groups = 0;
    adj.tri_group[v] = cluster_normals(normals, feature_angle_deg, &groups);
    if (mesh.vertex_class[v] == VertexClass::UserFixed) continue;
    if (tris.empty())
      mesh.vertex_class[v] = VertexClass::Interior;
    else if (groups <= 1)
      mesh.vertex_class[v] = VertexClass::SurfaceSmooth;
    else if (groups == 2)
      mesh.vertex_class[v] = VertexClass::FeatureEdge;
    else
      mesh.vertex_class[v] = VertexClass::Corner;
  }
  return adj;
}

/// Marks every vertex whose reference tag is in `refs` as UserFixed.
inline void fix_vertices_by_ref(TetMesh& mesh, const std::vector<int>& refs) {
  mesh.fill_attributes();
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
    if (std::find(refs.begin(), refs.end(), mesh.vertex_ref[v]) != refs.end())
      mesh.vertex_class[v] = VertexClass::UserFixed;
}

}  // namespace tetforge
