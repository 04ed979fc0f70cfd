#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>

#include "tetforge/tetforge.hpp"

namespace tetforge::testing {

inline std::array<Vec3, 4> regular_tet(double edge = 1.0) {
  const double h = edge * std::sqrt(2.0 / 3.0);
  return {Vec3(0, 0, 0), Vec3(edge, 0, 0), Vec3(edge / 2, edge * std::sqrt(3.0) / 2, 0),
          Vec3(edge / 2, edge * std::sqrt(3.0) / 6, h)};
}

inline std::array<Vec3, 4> corner_tet() { return {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)}; }

/// Positively oriented random tet with quality above `min_q`.
inline std::array<Vec3, 4> random_tet(std::mt19937_64& rng, double min_q = 0.05) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (true) {
    std::array<Vec3, 4> p;
    for (auto& x : p) x = Vec3(u(rng), u(rng), u(rng));
    if (tet_signed_volume(p) < 0) std::swap(p[2], p[3]);
    if (volume_length_quality(p) > min_q) return p;
  }
}

inline Vec12 pack(const std::array<Vec3, 4>& p) {
  Vec12 x;
  for (int i = 0; i < 4; ++i) x.segment<3>(3 * i) = p[i];
  return x;
}

inline std::array<Vec3, 4> unpack(const Vec12& x) {
  return {x.segment<3>(0), x.segment<3>(3), x.segment<3>(6), x.segment<3>(9)};
}

/// Central difference gradient of a scalar function.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& fn, const Eigen::VectorXd& x,
                                   double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (fn(xp) - fn(xm)) / (2 * h);
  }
  return g;
}

/// Central difference Jacobian of a vector function (here: of a gradient).
inline Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& fn,
                                   const Eigen::VectorXd& x, double h) {
  const Eigen::VectorXd f0 = fn(x);
  Eigen::MatrixXd J(f0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    J.col(i) = (fn(xp) - fn(xm)) / (2 * h);
  }
  return J;
}

inline double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

inline TetMesh single_tet_mesh(const std::array<Vec3, 4>& p) {
  TetMesh m;
  m.vertices.assign(p.begin(), p.end());
  m.tets.push_back({0, 1, 2, 3});
  m.fill_attributes();
  return m;
}

/// Unit cube split into six tets around the main diagonal.
inline TetMesh cube6() { return detail::kuhn_grid(1); }

/// Spoke patch: one centre vertex (index 0) joined to the octahedron
/// with vertices at +-1 on each axis, 8 tets.
inline TetMesh octahedron_star(const Vec3& centre = Vec3::Zero()) {
  TetMesh m;
  m.vertices = {centre,          Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0),
                Vec3(0, -1, 0), Vec3(0, 0, 1), Vec3(0, 0, -1)};
  for (Index x : {1, 2})
    for (Index y : {3, 4})
      for (Index z : {5, 6}) {
        Tet t{0, x, y, z};
        if (tet_signed_volume(m.vertices[0], m.vertices[x], m.vertices[y], m.vertices[z]) < 0) std::swap(t[2], t[3]);
        m.tets.push_back(t);
      }
  m.fill_attributes();
  return m;
}

inline double mesh_min_quality(const TetMesh& m) { return min_quality(m); }

inline std::size_t count_inverted(const TetMesh& m) {
  std::size_t n = 0;
  for (std::size_t t = 0; t < m.tets.size(); ++t) n += m.tet_volume(t) <= 0.0 ? 1 : 0;
  return n;
}

}  // namespace tetforge::testing
