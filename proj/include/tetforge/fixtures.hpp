#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tetforge/error.hpp"
#include "tetforge/geometry.hpp"
#include "tetforge/mesh.hpp"
#include "tetforge/quality.hpp"

namespace tetforge {

enum class FixtureKind { Grid, Sphere, WithSlivers, WithInverted };

inline constexpr double kMinDefectJitter = 0.1;

struct FixtureSpec {
  FixtureKind kind = FixtureKind::Grid;
  int n = 4;                  // cells per side
  int k = 0;                  // slivers / inverted elements to plant
  double perturbation = 0.0;  // interior jitter, fraction of the cell size
};

namespace detail {

inline Index grid_id(int i, int j, int k, int n) { return static_cast<Index>(i + (n + 1) * (j + (n + 1) * k)); }

// Unit cube [0,1]^3, n^3 cells, six tets per cell around the main diagonal.
// With `mirrored` (n even) the cells are reflected per octant so every cell
// diagonal points away from the cube centre.
inline TetMesh kuhn_grid(int n, bool mirrored = false) {
  TetMesh m;
  const double h = 1.0 / n;
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) m.vertices.emplace_back(i * h, j * h, k * h);

  static constexpr int kPerms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        for (const auto& perm : kPerms) {
          const int cell[3] = {i, j, k};
          int c[3], dir[3];
          for (int a = 0; a < 3; ++a) {
            const bool flip = mirrored && 2 * cell[a] < n;
            c[a] = flip ? 1 : 0;
            dir[a] = flip ? -1 : 1;
          }
          Tet t;
          t[0] = grid_id(i + c[0], j + c[1], k + c[2], n);
          for (int s = 0; s < 3; ++s) {
            c[perm[s]] += dir[perm[s]];
            t[s + 1] = grid_id(i + c[0], j + c[1], k + c[2], n);
          }
          if (tet_signed_volume(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]], m.vertices[t[3]]) < 0)
            std::swap(t[2], t[3]);
          m.tets.push_back(t);
        }
      }
  m.fill_attributes();
  return m;
}

inline std::vector<std::vector<Index>> incident_tets(const TetMesh& m) {
  std::vector<std::vector<Index>> vt(m.vertices.size());
  for (std::size_t t = 0; t < m.tets.size(); ++t)
    for (Index v : m.tets[t]) vt[v].push_back(static_cast<Index>(t));
  return vt;
}

inline std::vector<char> boundary_flags(const TetMesh& m, int n) {
  std::vector<char> on(m.vertices.size(), 0);
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i)
        if (i == 0 || j == 0 || k == 0 || i == n || j == n || k == n) on[grid_id(i, j, k, n)] = 1;
  return on;
}

inline double min_star_quality(const TetMesh& m, const std::vector<Index>& star) {
  double q = std::numeric_limits<double>::infinity();
  for (Index t : star) q = std::min(q, volume_length_quality(m.tet_points(t)));
  return q;
}

// Random jitter of interior vertices, redrawn while it would push a star
// element below quality 0.1.
inline void jitter_interior(TetMesh& m, const std::vector<char>& boundary, double amplitude, std::mt19937_64& rng) {
  if (amplitude <= 0.0) return;
  const auto vt = incident_tets(m);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    if (boundary[v]) continue;
    const Vec3 x0 = m.vertices[v];
    const double q0 = min_star_quality(m, vt[v]);
    bool ok = false;
    for (int attempt = 0; attempt < 20 && !ok; ++attempt) {
      m.vertices[v] = x0 + Vec3(u(rng), u(rng), u(rng));
      ok = min_star_quality(m, vt[v]) > std::min(0.1, 0.5 * q0);
    }
    if (!ok) m.vertices[v] = x0;
  }
}

// Picks `k` interior vertices, no two sharing a tet.
inline std::vector<Index> pick_separated(const TetMesh& m, const std::vector<char>& boundary,
                                         const std::vector<std::vector<Index>>& vt, int k, std::mt19937_64& rng) {
  std::vector<Index> cand;
  for (std::size_t v = 0; v < m.vertices.size(); ++v)
    if (!boundary[v]) cand.push_back(static_cast<Index>(v));
  std::shuffle(cand.begin(), cand.end(), rng);
  std::vector<char> blocked(m.vertices.size(), 0);
  std::vector<Index> out;
  for (Index v : cand) {
    if (static_cast<int>(out.size()) == k) break;
    if (blocked[v]) continue;
    out.push_back(v);
    for (Index t : vt[v])
      for (Index w : m.tets[t]) blocked[w] = 1;
  }
  if (static_cast<int>(out.size()) < k)
    throw InvalidArgument("fixture infeasible: only " + std::to_string(out.size()) +
                          " separated interior vertices for k = " + std::to_string(k));
  return out;
}

struct Hit {
  double tau;
  Index tet;
};

// Times at which moving v along d zeroes each star element's volume (the
// volume is linear in v), ascending.
inline std::vector<Hit> hitting_times(const TetMesh& m, Index v, const std::vector<Index>& star, const Vec3& d) {
  std::vector<Hit> hits;
  for (Index t : star) {
    auto p = m.tet_points(t);
    int slot = 0;
    while (m.tets[t][slot] != v) ++slot;
    const double v0 = tet_signed_volume(p);
    p[slot] += d;
    const double rate = tet_signed_volume(p) - v0;
    if (rate < 0.0) hits.push_back({-v0 / rate, t});
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.tau < b.tau; });
  return hits;
}

inline Vec3 random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec3 d;
  do d = Vec3(g(rng), g(rng), g(rng));
  while (d.norm() < 1e-6);
  return d.normalized();
}

inline void plant_defects(TetMesh& m, const std::vector<char>& boundary, int k, bool invert, std::mt19937_64& rng) {
  const auto vt = incident_tets(m);
  const auto chosen = pick_separated(m, boundary, vt, k, rng);
  for (Index v : chosen) {
    const Vec3 x0 = m.vertices[v];
    bool done = false;
    for (int attempt = 0; attempt < 200 && !done; ++attempt) {
      const Vec3 d = random_direction(rng);
      const auto hits = hitting_times(m, v, vt[v], d);
      if (hits.size() < 2 || hits[1].tau < 1.05 * hits[0].tau) continue;
      if (invert) {
        const double tau = hits[0].tau + 0.5 * std::min(hits[1].tau - hits[0].tau, hits[0].tau);
        m.vertices[v] = x0 + tau * d;
        done = true;
      } else {
        for (double eps = 0.1; eps > 1e-6; eps *= 0.5) {
          m.vertices[v] = x0 + (1.0 - eps) * hits[0].tau * d;
          if (dihedral_angles(m.tet_points(hits[0].tet)).min() < 5.0) {
            done = true;
            break;
          }
        }
        if (!done) m.vertices[v] = x0;
      }
    }
    if (!done) throw InvalidArgument("fixture infeasible: could not plant a defect at vertex " + std::to_string(v));
  }
}

// Smooth map of the cube [-1,1]^3 onto the unit ball.
inline Vec3 spherify(const Vec3& p) {
  const double x2 = p.x() * p.x(), y2 = p.y() * p.y(), z2 = p.z() * p.z();
  return {p.x() * std::sqrt(std::max(0.0, 1.0 - y2 / 2 - z2 / 2 + y2 * z2 / 3)),
          p.y() * std::sqrt(std::max(0.0, 1.0 - z2 / 2 - x2 / 2 + z2 * x2 / 3)),
          p.z() * std::sqrt(std::max(0.0, 1.0 - x2 / 2 - y2 / 2 + x2 * y2 / 3))};
}

}  // namespace detail

/// Deterministic synthetic meshes for tests and benchmarks.
///   Grid: unit cube, 6 tets per cell, optional interior jitter.
///   Sphere: octant-mirrored grid on [-1,1]^3 (n even) mapped smoothly onto
///   the unit ball.
///   WithSlivers / WithInverted: grid with k separated interior vertices
///   pushed toward (or just past) the plane of one star face, leaving k
///   slivers (min dihedral < 5 degrees) or exactly k inverted tets. These
///   always jitter the interior by at least kMinDefectJitter.
inline TetMesh generate_test_mesh(const FixtureSpec& spec, std::uint64_t seed) {
  if (spec.n < 2) throw InvalidArgument("fixture needs n >= 2");
  if (spec.k < 0) throw InvalidArgument("fixture needs k >= 0");
  std::mt19937_64 rng(seed);
  if (spec.kind == FixtureKind::Sphere && spec.n % 2 != 0) throw InvalidArgument("sphere fixture needs even n");
  TetMesh m = detail::kuhn_grid(spec.n, spec.kind == FixtureKind::Sphere);
  if (static_cast<std::size_t>(spec.k) > m.tets.size())
    throw InvalidArgument("fixture infeasible: k exceeds the tet count");
  const auto boundary = detail::boundary_flags(m, spec.n);
  const double h = 1.0 / spec.n;

  switch (spec.kind) {
    case FixtureKind::Grid:
      detail::jitter_interior(m, boundary, spec.perturbation * h, rng);
      break;
    case FixtureKind::Sphere:
      for (auto& p : m.vertices) p = detail::spherify(2.0 * p - Vec3::Ones());
      detail::jitter_interior(m, boundary, spec.perturbation * 2.0 * h, rng);
      break;
    case FixtureKind::WithSlivers:
    case FixtureKind::WithInverted:
      // Vertex stars of the plain grid have coplanar face pairs; the jitter
      // separates them so one plane crossing touches one tet.
      detail::jitter_interior(m, boundary, std::max(spec.perturbation, kMinDefectJitter) * h, rng);
      detail::plant_defects(m, boundary, spec.k, spec.kind == FixtureKind::WithInverted, rng);
      break;
  }
  m.fill_attributes();
  return m;
}

/// Parses "grid:N[:P]", "sphere:N[:P]", "slivers:N:K[:P]", "inverted:N:K[:P]".
inline FixtureSpec parse_fixture_spec(std::string_view text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(':', start);
    parts.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  auto to_int = [&](const std::string& s) {
    int v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw InvalidArgument("bad fixture spec '" + std::string(text) + "'");
    return v;
  };
  auto to_real = [&](const std::string& s) {
    double v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw InvalidArgument("bad fixture spec '" + std::string(text) + "'");
    return v;
  };
  FixtureSpec spec;
  const std::string& kind = parts[0];
  if ((kind == "grid" || kind == "sphere") && (parts.size() == 2 || parts.size() == 3)) {
    spec.kind = kind == "grid" ? FixtureKind::Grid : FixtureKind::Sphere;
    spec.n = to_int(parts[1]);
    if (parts.size() == 3) spec.perturbation = to_real(parts[2]);
  } else if ((kind == "slivers" || kind == "inverted") && (parts.size() == 3 || parts.size() == 4)) {
    spec.kind = kind == "slivers" ? FixtureKind::WithSlivers : FixtureKind::WithInverted;
    spec.n = to_int(parts[1]);
    spec.k = to_int(parts[2]);
    if (parts.size() == 4) spec.perturbation = to_real(parts[3]);
  } else {
    throw InvalidArgument("bad fixture spec '" + std::string(text) + "'");
  }
  return spec;
}

}  // namespace tetforge
