#pragma once

#include <array>
#include <cstddef>
#include <limits>

#include "tetforge/geometry.hpp"
#include "tetforge/mesh.hpp"
#include "tetforge/quality.hpp"
#include "tetforge/topology.hpp"

namespace tetforge {

inline constexpr int kHistogramBins = 18;  // 10 degree bins over [0, 180]

using DihedralHistogram = std::array<std::size_t, kHistogramBins>;

inline int histogram_bin(double deg) {
  int b = static_cast<int>(deg / 10.0);
  return b < 0 ? 0 : (b >= kHistogramBins ? kHistogramBins - 1 : b);
}

struct GlobalMetrics {
  double total_volume = 0.0;
  double total_surface_area = 0.0;
  double q_min = std::numeric_limits<double>::infinity();
  std::ptrdiff_t worst_tet = -1;
  DihedralHistogram histogram{};
  double min_dihedral = 180.0;
  double max_dihedral = 0.0;
  std::size_t inverted = 0;  // tets with negative signed volume
};

/// Volume by the divergence theorem over the surface triangles:
/// (1/3) sum (centroid . n) area. Equals the summed tet volume on a closed,
/// outward-oriented surface.
inline double surface_integral_volume(const TetMesh& mesh) {
  double v = 0.0;
  for (const auto& t : mesh.surface_tris) {
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    v += ((a + b + c) / 3.0).dot(triangle_area_vector(a, b, c));
  }
  return v / 3.0;
}

inline double total_volume(const TetMesh& mesh) {
  double v = 0.0;
  for (std::size_t t = 0; t < mesh.tets.size(); ++t) v += mesh.tet_volume(t);
  return v;
}

inline double min_quality(const TetMesh& mesh, std::ptrdiff_t* worst = nullptr) {
  double q = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
    const double qt = volume_length_quality(mesh.tet_points(t));
    if (qt < q) {
      q = qt;
      if (worst) *worst = static_cast<std::ptrdiff_t>(t);
    }
  }
  return q;
}

/// Whole-mesh summary. Flat tets contribute their limiting 0/180 degree angles.
inline GlobalMetrics global_metrics(const TetMesh& mesh, const AdjacencyIndex& /*adjacency*/) {
  GlobalMetrics g;
  for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
    const auto p = mesh.tet_points(t);
    const double v = tet_signed_volume(p);
    g.total_volume += v;
    if (v < 0.0) ++g.inverted;
    const double q = volume_length_quality(p);
    if (q < g.q_min) {
      g.q_min = q;
      g.worst_tet = static_cast<std::ptrdiff_t>(t);
    }
    const auto d = detail::dihedral_angles_raw(p);
    for (double a : d.deg) {
      ++g.histogram[histogram_bin(a)];
      g.min_dihedral = std::min(g.min_dihedral, a);
      g.max_dihedral = std::max(g.max_dihedral, a);
    }
  }
  for (const auto& t : mesh.surface_tris)
    g.total_surface_area += triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
  return g;
}

}  // namespace tetforge
