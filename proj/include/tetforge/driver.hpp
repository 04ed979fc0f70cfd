#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "tetforge/barrier.hpp"
#include "tetforge/error.hpp"
#include "tetforge/metrics.hpp"
#include "tetforge/patch.hpp"
#include "tetforge/solver.hpp"
#include "tetforge/surface_constraint.hpp"
#include "tetforge/topology.hpp"

namespace tetforge {

struct RunConfig {
  /// Barrier constants, one optimization stage each; values in (0,1), nondecreasing.
  std::vector<double> b_schedule{0.75, 0.85, 0.95};
  double target_quality = 0.3;
  int max_passes = 30;  // per stage
  PatchMode mode = PatchMode::Selective;
  bool surface_motion = true;
  double feature_angle = 30.0;
  std::uint64_t seed = 0;

  int max_inner = 3;
  double convergence_tol = 1e-4;  // on q_min improvement per pass
  std::size_t max_patch_vertices = 48;
  ObjectiveKind objective = ObjectiveKind::LogBarrier;
  int jobs = 1;

  void check() const {
    if (b_schedule.empty()) throw InvalidArgument("barrier schedule is empty");
    for (std::size_t i = 0; i < b_schedule.size(); ++i) {
      if (!(b_schedule[i] > 0.0 && b_schedule[i] < 1.0))
        throw InvalidArgument("barrier constants must lie in (0,1)");
      if (i > 0 && b_schedule[i] < b_schedule[i - 1])
        throw InvalidArgument("barrier schedule must be nondecreasing");
    }
    if (max_passes < 1) throw InvalidArgument("max_passes must be positive");
    if (max_inner < 1) throw InvalidArgument("max_inner must be positive");
    if (jobs < 1) throw InvalidArgument("jobs must be positive");
    if (max_patch_vertices < 1) throw InvalidArgument("max_patch_vertices must be positive");
  }
};

struct PassRecord {
  int stage = 0;  // index into b_schedule
  int pass = 0;   // 1-based within the stage
  double b = 0.0;
  double gamma = 0.0;
  double q_min_start = 0.0;
  double q_min = 0.0;
  double min_dihedral = 0.0;
  double max_dihedral = 0.0;
  double volume = 0.0;
  double volume_drift_percent = 0.0;
  double seconds = 0.0;
  std::size_t patches = 0;
  std::size_t stalled = 0;
  std::size_t accepted_steps = 0;
  std::size_t barrier_violations = 0;
};

struct OptimizationReport {
  std::vector<PassRecord> passes;
  GlobalMetrics initial;
  GlobalMetrics final;
  double initial_volume = 0.0;  // enclosed by the boundary surface
  double final_volume = 0.0;
  double volume_drift_percent = 0.0;
  double seconds = 0.0;
  std::size_t stalled_patches = 0;
  std::size_t demoted_vertices = 0;
};

struct RunHooks {
  /// Called after every accepted Newton step (serialized under a lock when jobs > 1).
  AcceptedStepHook on_step;
  std::function<void(const PassRecord&)> on_pass;
};

/// Volume enclosed by the boundary triangles (those owned by exactly one
/// tet). Depends only on boundary vertex positions.
inline double boundary_volume(const TetMesh& mesh, const AdjacencyIndex& adj) {
  double v = 0.0;
  for (std::size_t s = 0; s < mesh.surface_tris.size(); ++s) {
    if (adj.tri_owner[s] < 0) continue;
    const auto& t = mesh.surface_tris[s];
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    v += ((a + b + c) / 3.0).dot(triangle_area_vector(a, b, c));
  }
  return v / 3.0;
}

inline double volume_drift_percent(double v0, double v1) {
  if (v0 == 0.0) return v1 == 0.0 ? 0.0 : INFINITY;
  return std::abs(v1 - v0) / std::abs(v0) * 100.0;
}

namespace detail {

// Greedy coloring so that, within a color, no patch moves a vertex that
// another patch's ring reads.
inline std::vector<std::vector<std::size_t>> color_patches(const TetMesh& mesh, const std::vector<Patch>& patches) {
  const std::size_t nv = mesh.vertices.size();
  std::vector<int> owner(nv, -1);
  for (std::size_t p = 0; p < patches.size(); ++p)
    for (Index v : patches[p].free_vertices) owner[v] = static_cast<int>(p);

  std::vector<int> color(patches.size(), -1);
  std::vector<std::vector<std::size_t>> classes;
  std::vector<int> seen(patches.size(), -1);
  for (std::size_t p = 0; p < patches.size(); ++p) {
    std::vector<char> used(classes.size() + 1, 0);
    for (Index t : patches[p].ring_tets)
      for (Index v : mesh.tets[t]) {
        const int q = owner[v];
        if (q < 0 || q == static_cast<int>(p) || seen[q] == static_cast<int>(p)) continue;
        seen[q] = static_cast<int>(p);
        if (color[q] >= 0) used[color[q]] = 1;
      }
    int c = 0;
    while (used[c]) ++c;
    color[p] = c;
    if (c == static_cast<int>(classes.size())) classes.emplace_back();
    classes[c].push_back(p);
  }
  // Symmetric: a tet joining p's free vertex to q's lies in both rings.
  return classes;
}

}  // namespace detail

/// Optimizes `mesh` in place: for each barrier constant, repeated passes of
/// {q_min, gamma, select patches, optimize each} until the worst quality
/// improves by less than convergence_tol or max_passes is reached.
inline OptimizationReport optimize_mesh(TetMesh& mesh, const RunConfig& cfg, const RunHooks& hooks = {},
                                        AdjacencyIndex* adjacency_out = nullptr) {
  cfg.check();
  using clock = std::chrono::steady_clock;
  const auto run_start = clock::now();

  AdjacencyIndex adj = build_topology(mesh, cfg.feature_angle);
  OptimizationReport rep;
  rep.initial = global_metrics(mesh, adj);
  rep.initial_volume = boundary_volume(mesh, adj);

  PatchOptions popts;
  popts.surface_motion = cfg.surface_motion;
  popts.max_free_vertices = cfg.max_patch_vertices;

  std::mutex hook_mutex;
  SolverOptions sopts;
  sopts.max_inner = cfg.max_inner;
  if (hooks.on_step) {
    if (cfg.jobs > 1)
      sopts.on_accept = [&](const TetMesh& m, const Patch& p) {
        std::lock_guard lock(hook_mutex);
        hooks.on_step(m, p);
      };
    else
      sopts.on_accept = hooks.on_step;
  }

  std::mutex demote_mutex;
  auto run_patch = [&](Patch patch, const BarrierParams& params) -> SolveReport {
    if (!cfg.surface_motion) return optimize_patch(mesh, patch, params, nullptr, sopts);
    ConstraintSystem cs = build_constraints(patch, mesh, adj);
    if (!cs.demoted.empty()) {
      // Vertices with a vanishing normal are pinned from here on.
      for (Index v : cs.demoted) mesh.vertex_class[v] = VertexClass::Corner;
      {
        std::lock_guard lock(demote_mutex);
        rep.demoted_vertices += cs.demoted.size();
      }
      std::erase_if(patch.free_vertices, [&](Index v) { return mesh.vertex_class[v] == VertexClass::Corner; });
      patch = [&] {
        Patch p = make_patch(adj, patch.free_vertices);
        p.seed_tets = patch.seed_tets;
        p.seed_quality = patch.seed_quality;
        return p;
      }();
      cs = build_constraints(patch, mesh, adj);
    }
    return optimize_patch(mesh, patch, params, cs.rows() > 0 ? &cs : nullptr, sopts);
  };

  for (std::size_t stage = 0; stage < cfg.b_schedule.size(); ++stage) {
    const double b = cfg.b_schedule[stage];
    for (int pass = 1; pass <= cfg.max_passes; ++pass) {
      const auto pass_start = clock::now();
      const double q0 = min_quality(mesh);
      BarrierParams params = BarrierParams::from_quality(q0, b, cfg.objective);
      sopts.line_search.quality_floor = q0;
      const auto patches = select_patches(mesh, adj, cfg.target_quality, cfg.mode, popts);
      if (patches.empty()) break;

      PassRecord rec;
      rec.stage = static_cast<int>(stage);
      rec.pass = pass;
      rec.b = b;
      rec.gamma = params.gamma;
      rec.q_min_start = q0;
      rec.patches = patches.size();

      std::vector<SolveReport> results(patches.size());
      if (cfg.jobs <= 1) {
        for (std::size_t i = 0; i < patches.size(); ++i) results[i] = run_patch(patches[i], params);
      } else {
        for (const auto& cls : detail::color_patches(mesh, patches)) {
          std::atomic<std::size_t> next{0};
          auto worker = [&] {
            for (std::size_t i; (i = next.fetch_add(1)) < cls.size();)
              results[cls[i]] = run_patch(patches[cls[i]], params);
          };
          std::vector<std::jthread> pool;
          const auto nthreads = std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), cls.size());
          for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
          worker();
        }
      }
      for (const auto& r : results) {
        rec.stalled += r.stalled ? 1 : 0;
        rec.accepted_steps += static_cast<std::size_t>(r.iterations);
        rec.barrier_violations += static_cast<std::size_t>(r.barrier_violations);
      }
      rep.stalled_patches += rec.stalled;

      const GlobalMetrics gm = global_metrics(mesh, adj);
      rec.q_min = gm.q_min;
      rec.min_dihedral = gm.min_dihedral;
      rec.max_dihedral = gm.max_dihedral;
      rec.volume = boundary_volume(mesh, adj);
      rec.volume_drift_percent = volume_drift_percent(rep.initial_volume, rec.volume);
      rec.seconds = std::chrono::duration<double>(clock::now() - pass_start).count();
      rep.passes.push_back(rec);
      if (hooks.on_pass) hooks.on_pass(rec);

      if (rec.q_min - q0 < cfg.convergence_tol) break;
    }
  }

  rep.final = global_metrics(mesh, adj);
  rep.final_volume = boundary_volume(mesh, adj);
  rep.volume_drift_percent = volume_drift_percent(rep.initial_volume, rep.final_volume);
  rep.seconds = std::chrono::duration<double>(clock::now() - run_start).count();
  if (adjacency_out) *adjacency_out = std::move(adj);
  return rep;
}

}  // namespace tetforge
