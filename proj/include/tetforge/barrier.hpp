#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "tetforge/error.hpp"
#include "tetforge/mesh.hpp"
#include "tetforge/patch.hpp"
#include "tetforge/quality.hpp"

namespace tetforge {

/// Which per-element objective is summed over a patch. SquaredLogBarrier
/// sums I^2 instead of I.
enum class ObjectiveKind { LogBarrier, SquaredLogBarrier };

/// Barrier level strictly below the current worst quality:
/// b*q_min for q_min > 0, q_min/b for q_min < 0, -(1-b) at q_min == 0.
inline double compute_gamma(double q_min, double b) {
  if (!(b > 0.0 && b < 1.0)) throw InvalidArgument("barrier constant must lie in (0,1), got " + std::to_string(b));
  if (q_min > 0.0) return b * q_min;
  if (q_min < 0.0) return q_min / b;
  return -(1.0 - b);
}

struct BarrierParams {
  double b = 0.75;
  double q_min = 1.0;
  double gamma = 0.75;
  ObjectiveKind kind = ObjectiveKind::LogBarrier;

  static BarrierParams from_quality(double q_min, double b,
                                    ObjectiveKind kind = ObjectiveKind::LogBarrier) {
    return {b, q_min, compute_gamma(q_min, b), kind};
  }
};

/// I = q^2 / (2(1-gamma)) - ln(q - gamma). Throws BarrierViolation for q <= gamma.
inline double barrier_value(double q, double gamma) {
  if (!(q > gamma))
    throw BarrierViolation("quality " + std::to_string(q) + " at or below barrier " + std::to_string(gamma));
  return q * q / (2.0 * (1.0 - gamma)) - std::log(q - gamma);
}

struct ElementObjective {
  double value = 0.0;
  Vec12 grad = Vec12::Zero();
  Mat12 hess = Mat12::Zero();
};

/// Gradient and Hessian of I through q. The rank-one coefficient is the
/// exact second derivative, 1/(1-gamma) + 1/(q-gamma)^2.
inline ElementObjective barrier_grad_hess(const QualityDiff& qd, double gamma) {
  ElementObjective e;
  e.value = barrier_value(qd.q, gamma);
  const double dq = qd.q - gamma;
  const double d1 = qd.q / (1.0 - gamma) - 1.0 / dq;
  const double d2 = 1.0 / (1.0 - gamma) + 1.0 / (dq * dq);
  e.grad = d1 * qd.grad;
  e.hess = d2 * qd.grad * qd.grad.transpose() + d1 * qd.hess;
  return e;
}

inline ElementObjective element_objective(const QualityDiff& qd, double gamma, ObjectiveKind kind) {
  ElementObjective e = barrier_grad_hess(qd, gamma);
  if (kind == ObjectiveKind::SquaredLogBarrier) {
    const double i = e.value;
    e.hess = 2.0 * (e.grad * e.grad.transpose() + i * e.hess);
    e.grad = 2.0 * i * e.grad;
    e.value = i * i;
  }
  return e;
}

/// Dense Newton system of one patch over its free-vertex coordinates.
/// Vertex free_vertices[k] owns DOFs 3k, 3k+1, 3k+2.
struct PatchSystem {
  std::vector<Index> dof_vertices;
  Eigen::MatrixXd S;
  Eigen::VectorXd f;
  double objective = 0.0;

  Eigen::Index size() const { return f.size(); }
};

namespace detail {

inline std::unordered_map<Index, int> local_dofs(const std::vector<Index>& free_vertices) {
  std::unordered_map<Index, int> m;
  m.reserve(free_vertices.size());
  for (std::size_t k = 0; k < free_vertices.size(); ++k) m.emplace(free_vertices[k], static_cast<int>(k));
  return m;
}

}  // namespace detail

inline PatchSystem assemble_patch_system(const TetMesh& mesh, const Patch& patch, const BarrierParams& params) {
  PatchSystem sys;
  sys.dof_vertices = patch.free_vertices;
  const auto n = static_cast<Eigen::Index>(3 * patch.free_vertices.size());
  sys.S = Eigen::MatrixXd::Zero(n, n);
  sys.f = Eigen::VectorXd::Zero(n);
  const auto dof = detail::local_dofs(patch.free_vertices);

  for (Index t : patch.ring_tets) {
    const QualityDiff qd = volume_length_diff(mesh.tet_points(t));
    if (!(qd.q > params.gamma))
      throw BarrierViolation("tet " + std::to_string(t) + " quality " + std::to_string(qd.q) +
                                 " at or below barrier " + std::to_string(params.gamma),
                             t);
    const ElementObjective e = element_objective(qd, params.gamma, params.kind);
    sys.objective += e.value;

    int local[4];
    for (int i = 0; i < 4; ++i) {
      const auto it = dof.find(mesh.tets[t][i]);
      local[i] = it == dof.end() ? -1 : it->second;
    }
    for (int i = 0; i < 4; ++i) {
      if (local[i] < 0) continue;
      sys.f.segment<3>(3 * local[i]) += e.grad.segment<3>(3 * i);
      for (int j = 0; j < 4; ++j) {
        if (local[j] < 0) continue;
        sys.S.block<3, 3>(3 * local[i], 3 * local[j]) += e.hess.block<3, 3>(3 * i, 3 * j);
      }
    }
  }
  return sys;
}

/// Objective over the ring at the current coordinates; false when some ring
/// tet is at or below the barrier. `min_q` receives the worst ring quality.
inline bool patch_objective(const TetMesh& mesh, const Patch& patch, const BarrierParams& params,
                            double& value, double* min_q = nullptr) {
  value = 0.0;
  if (min_q) *min_q = std::numeric_limits<double>::infinity();
  for (Index t : patch.ring_tets) {
    const double q = volume_length_quality(mesh.tet_points(t));
    if (min_q) *min_q = std::min(*min_q, q);
    if (!(q > params.gamma)) return false;
    const double i = barrier_value(q, params.gamma);
    value += params.kind == ObjectiveKind::SquaredLogBarrier ? i * i : i;
  }
  return true;
}

}  // namespace tetforge
