#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "tetforge/error.hpp"

namespace tetforge {

using Vec3 = Eigen::Vector3d;

/// Vertex pairs of the six tet edges, in the order DihedralSet reports them.
inline constexpr std::array<std::array<int, 2>, 6> kTetEdges{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

/// Faces opposite vertex 0..3, wound so the normal points away from the
/// opposite vertex when the tet has positive signed volume.
inline constexpr std::array<std::array<int, 3>, 4> kTetFaces{
    {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}}};

inline double tet_signed_volume(const Vec3& p0, const Vec3& p1, const Vec3& p2,
                                const Vec3& p3) {
  return (p1 - p0).dot((p2 - p0).cross(p3 - p0)) / 6.0;
}

inline double tet_signed_volume(const std::array<Vec3, 4>& p) {
  return tet_signed_volume(p[0], p[1], p[2], p[3]);
}

/// Twice-area normal (right-hand rule) of triangle a,b,c.
inline Vec3 triangle_area_vector(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a);
}

inline double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return triangle_area_vector(a, b, c).norm();
}

inline double rad_to_deg(double r) { return r * 180.0 / std::numbers::pi; }

/// Six interior dihedral angles in degrees, one per entry of kTetEdges.
struct DihedralSet {
  std::array<double, 6> deg{};

  double min() const { return *std::min_element(deg.begin(), deg.end()); }
  double max() const { return *std::max_element(deg.begin(), deg.end()); }
};

namespace detail {

// Angles from outward face normals. Orientation independent: the normal of the
// face opposite vertex k is flipped to point away from k. No degeneracy check;
// flat tets give angles of 0 or 180.
inline DihedralSet dihedral_angles_raw(const std::array<Vec3, 4>& p) {
  std::array<Vec3, 4> n;
  for (int k = 0; k < 4; ++k) {
    const auto& f = kTetFaces[k];
    Vec3 nk = (p[f[1]] - p[f[0]]).cross(p[f[2]] - p[f[0]]);
    if (nk.dot(p[k] - p[f[0]]) > 0.0) nk = -nk;
    const double len = nk.norm();
    n[k] = len > 0.0 ? Vec3(nk / len) : Vec3::Zero();
  }
  DihedralSet out;
  for (int e = 0; e < 6; ++e) {
    // The two faces sharing edge (i,j) are those opposite the other two vertices.
    int others[2];
    int m = 0;
    for (int k = 0; k < 4; ++k)
      if (k != kTetEdges[e][0] && k != kTetEdges[e][1]) others[m++] = k;
    const double c = std::clamp(n[others[0]].dot(n[others[1]]), -1.0, 1.0);
    out.deg[e] = 180.0 - rad_to_deg(std::acos(c));
  }
  return out;
}

}  // namespace detail

/// Throws DegenerateElement for a zero-volume tet, where the angles are undefined.
inline DihedralSet dihedral_angles(const std::array<Vec3, 4>& p) {
  const double v = tet_signed_volume(p);
  double l2 = 0.0;
  for (const auto& e : kTetEdges) l2 = std::max(l2, (p[e[0]] - p[e[1]]).squaredNorm());
  // Relative test: |V| against the cube of the longest edge.
  if (!(std::abs(v) > 1e-14 * l2 * std::sqrt(l2)))
    throw DegenerateElement("dihedral angles undefined for a degenerate tetrahedron");
  return detail::dihedral_angles_raw(p);
}

inline DihedralSet dihedral_angles(const Vec3& p0, const Vec3& p1, const Vec3& p2,
                                   const Vec3& p3) {
  return dihedral_angles(std::array<Vec3, 4>{p0, p1, p2, p3});
}

}  // namespace tetforge
