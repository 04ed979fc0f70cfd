#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "tetforge/barrier.hpp"
#include "tetforge/error.hpp"
#include "tetforge/mesh.hpp"
#include "tetforge/patch.hpp"
#include "tetforge/surface_constraint.hpp"

namespace tetforge {

struct NewtonDirection {
  Eigen::VectorXd dx;
  double shift = 0.0;  // diagonal regularization tau applied
};

/// Solves (S + tau I) dx = -f, tau = 0 when S factors as positive definite,
/// otherwise the smallest 10^k * max|diag S| (k = -10..4) that does.
inline NewtonDirection newton_direction(const Eigen::MatrixXd& S, const Eigen::VectorXd& f) {
  NewtonDirection out;
  const Eigen::Index n = S.rows();
  if (n == 0) {
    out.dx = Eigen::VectorXd::Zero(0);
    return out;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() == Eigen::Success) {
    out.dx = llt.solve(-f);
    if (out.dx.allFinite()) return out;
  }
  double d = S.diagonal().cwiseAbs().maxCoeff();
  if (!(d > 0.0)) d = 1.0;
  for (int k = -10; k <= 4; ++k) {
    const double tau = std::pow(10.0, k) * d;
    Eigen::MatrixXd shifted = S;
    shifted.diagonal().array() += tau;
    llt.compute(shifted);
    if (llt.info() != Eigen::Success) continue;
    out.dx = llt.solve(-f);
    if (!out.dx.allFinite()) continue;
    out.shift = tau;
    return out;
  }
  throw NoProgress("Newton system stays indefinite after a shift of 1e4 * max|diag|");
}

struct LineSearchOptions {
  double armijo = 1e-4;
  double min_alpha = 1.0 / (1 << 20);
  /// Trial points whose worst ring quality falls below this are rejected
  /// like barrier crossings. The driver sets it to the pass-start q_min.
  double quality_floor = -std::numeric_limits<double>::infinity();
};

struct LineSearchResult {
  double alpha = 0.0;
  double objective = 0.0;
  bool accepted = false;
  int trials = 0;
  int barrier_violations = 0;  // trial points rejected for q <= gamma or below the floor
};

/// Backtracking over alpha = 1, 1/2, 1/4, ... Accepts the first alpha with
/// every ring tet above the barrier and the quality floor and an Armijo decrease; the free
/// vertices are left at X + alpha dx. On failure they are restored.
/// `slope` is the directional derivative f . dx at alpha = 0.
inline LineSearchResult line_search(TetMesh& mesh, const Patch& patch, const Eigen::VectorXd& dx,
                                    const BarrierParams& params, double objective0, double slope,
                                    const LineSearchOptions& opts = {}) {
  LineSearchResult res;
  const auto& fv = patch.free_vertices;
  std::vector<Vec3> x0(fv.size());
  for (std::size_t k = 0; k < fv.size(); ++k) x0[k] = mesh.vertices[fv[k]];

  for (double alpha = 1.0; alpha >= opts.min_alpha; alpha *= 0.5) {
    ++res.trials;
    for (std::size_t k = 0; k < fv.size(); ++k)
      mesh.vertices[fv[k]] = x0[k] + alpha * dx.segment<3>(3 * static_cast<Eigen::Index>(k));
    double value = 0.0, ring_min = 0.0;
    if (!patch_objective(mesh, patch, params, value, &ring_min) || ring_min < opts.quality_floor) {
      ++res.barrier_violations;
      continue;
    }
    if (value <= objective0 + opts.armijo * alpha * slope) {
      res.alpha = alpha;
      res.objective = value;
      res.accepted = true;
      return res;
    }
  }
  for (std::size_t k = 0; k < fv.size(); ++k) mesh.vertices[fv[k]] = x0[k];
  res.objective = objective0;
  return res;
}

struct SolveReport {
  int iterations = 0;  // accepted Newton steps
  double initial_objective = 0.0;
  double final_objective = 0.0;
  std::vector<double> step_norms;  // |alpha dx| per accepted step
  std::vector<double> shifts;      // regularization tau per computed direction
  int barrier_violations = 0;
  int dropped_constraint_rows = 0;
  bool stalled = false;
};

using AcceptedStepHook = std::function<void(const TetMesh&, const Patch&)>;

struct SolverOptions {
  int max_inner = 3;
  LineSearchOptions line_search;
  /// Converged when |f . dx| falls below this times (1 + |objective|).
  double stationarity_tol = 1e-14;
  AcceptedStepHook on_accept;
};

/// Up to max_inner damped Newton steps on one patch at fixed gamma. With
/// `constraints`, each step is taken in the null space of the frozen
/// constraint rows and satisfies C dX = g.
inline SolveReport optimize_patch(TetMesh& mesh, const Patch& patch, const BarrierParams& params,
                                  ConstraintSystem* constraints = nullptr, const SolverOptions& opts = {}) {
  SolveReport rep;
  if (patch.free_vertices.empty()) {
    double v = 0.0;
    patch_objective(mesh, patch, params, v);
    rep.initial_objective = rep.final_objective = v;
    return rep;
  }
  for (int it = 0; it < opts.max_inner; ++it) {
    const PatchSystem sys = assemble_patch_system(mesh, patch, params);
    if (it == 0) rep.initial_objective = sys.objective;
    rep.final_objective = sys.objective;

    NewtonDirection dir;
    if (constraints && constraints->rows() > 0) {
      update_constraint_residual(*constraints, mesh);
      const ProjectedSystem proj = project_system(sys.S, sys.f, constraints->C, -constraints->g);
      rep.dropped_constraint_rows = proj.dropped_rows;
      dir = newton_direction(proj.S, proj.f);
    } else {
      dir = newton_direction(sys.S, sys.f);
    }
    rep.shifts.push_back(dir.shift);

    const double slope = sys.f.dot(dir.dx);
    if (std::abs(slope) <= opts.stationarity_tol * (1.0 + std::abs(sys.objective))) break;
    if (slope > 0.0) {
      // Only possible when a nonzero constraint residual dominates.
      rep.stalled = true;
      break;
    }

    const LineSearchResult ls = line_search(mesh, patch, dir.dx, params, sys.objective, slope, opts.line_search);
    rep.barrier_violations += ls.barrier_violations;
    if (!ls.accepted) {
      rep.stalled = true;
      break;
    }
    ++rep.iterations;
    rep.final_objective = ls.objective;
    rep.step_norms.push_back(ls.alpha * dir.dx.norm());
    if (opts.on_accept) opts.on_accept(mesh, patch);
  }
  return rep;
}

}  // namespace tetforge
