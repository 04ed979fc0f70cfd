#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Core>

#include "tetforge/error.hpp"
#include "tetforge/geometry.hpp"

namespace tetforge {

using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat12 = Eigen::Matrix<double, 12, 12>;

// q = 6*sqrt(2) V / l_rms^3 with l_rms^2 = s/6, s the sum of squared edge
// lengths, i.e. q = 72*sqrt(3) V s^(-3/2).
inline const double kVolumeLengthScale = 72.0 * std::numbers::sqrt3;

/// Volume-length quality and its derivatives with respect to the 12
/// vertex coordinates (vertex-major: x0 y0 z0 x1 ...).
struct QualityDiff {
  double q = 0.0;
  Vec12 grad = Vec12::Zero();
  Mat12 hess = Mat12::Zero();
};

namespace detail {

inline double sum_squared_edges(const std::array<Vec3, 4>& p) {
  double s = 0.0;
  for (const auto& e : kTetEdges) s += (p[e[0]] - p[e[1]]).squaredNorm();
  return s;
}

inline Eigen::Matrix3d skew(const Vec3& v) {
  Eigen::Matrix3d m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

}  // namespace detail

/// 1 for the regular tet, 0 when flat, negative when inverted.
inline double volume_length_quality(const std::array<Vec3, 4>& p) {
  const double s = detail::sum_squared_edges(p);
  if (!(s > 0.0)) throw DegenerateElement("volume-length quality undefined: all vertices coincide");
  return kVolumeLengthScale * tet_signed_volume(p) / (s * std::sqrt(s));
}

inline double volume_length_quality(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3) {
  return volume_length_quality(std::array<Vec3, 4>{p0, p1, p2, p3});
}

inline QualityDiff volume_length_diff(const std::array<Vec3, 4>& p) {
  const double s = detail::sum_squared_edges(p);
  if (!(s > 0.0)) throw DegenerateElement("volume-length quality undefined: all vertices coincide");

  const Vec3 a = p[1] - p[0], b = p[2] - p[0], c = p[3] - p[0];
  const double vol = a.dot(b.cross(c)) / 6.0;

  // dV in (a, b, c), then mapped to vertices through a = p1 - p0 etc.
  Vec12 dv;
  const Vec3 da = b.cross(c) / 6.0, db = c.cross(a) / 6.0, dc = a.cross(b) / 6.0;
  dv.segment<3>(3) = da;
  dv.segment<3>(6) = db;
  dv.segment<3>(9) = dc;
  dv.segment<3>(0) = -(da + db + dc);

  // d2V in (a, b, c); the diagonal blocks vanish (V is trilinear).
  Eigen::Matrix<double, 9, 9> h9 = Eigen::Matrix<double, 9, 9>::Zero();
  const Eigen::Matrix3d hab = -detail::skew(c) / 6.0;
  const Eigen::Matrix3d hac = detail::skew(b) / 6.0;
  const Eigen::Matrix3d hbc = -detail::skew(a) / 6.0;
  h9.block<3, 3>(0, 3) = hab;
  h9.block<3, 3>(3, 0) = hab.transpose();
  h9.block<3, 3>(0, 6) = hac;
  h9.block<3, 3>(6, 0) = hac.transpose();
  h9.block<3, 3>(3, 6) = hbc;
  h9.block<3, 3>(6, 3) = hbc.transpose();
  Eigen::Matrix<double, 9, 12> jac = Eigen::Matrix<double, 9, 12>::Zero();
  for (int k = 0; k < 3; ++k) {
    jac.block<3, 3>(3 * k, 0) = -Eigen::Matrix3d::Identity();
    jac.block<3, 3>(3 * k, 3 * (k + 1)) = Eigen::Matrix3d::Identity();
  }
  const Mat12 hv = jac.transpose() * h9 * jac;

  // s = sum |pi - pj|^2: ds_i = 2 sum_j (pi - pj), d2s = 6 I on diagonal blocks, -2 I off.
  Vec12 ds;
  for (int i = 0; i < 4; ++i) {
    Vec3 g = Vec3::Zero();
    for (int j = 0; j < 4; ++j)
      if (j != i) g += p[i] - p[j];
    ds.segment<3>(3 * i) = 2.0 * g;
  }
  Mat12 hs;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      hs.block<3, 3>(3 * i, 3 * j) = (i == j ? 6.0 : -2.0) * Eigen::Matrix3d::Identity();

  const double k = kVolumeLengthScale;
  const double s32 = s * std::sqrt(s);
  const double s52 = s32 * s;
  const double s72 = s52 * s;

  QualityDiff out;
  out.q = k * vol / s32;
  out.grad = k * (dv / s32 - 1.5 * vol / s52 * ds);
  out.hess = k * (hv / s32 - 1.5 / s52 * (dv * ds.transpose() + ds * dv.transpose()) -
                  1.5 * vol / s52 * hs + 3.75 * vol / s72 * ds * ds.transpose());
  return out;
}

}  // namespace tetforge
