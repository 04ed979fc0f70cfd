#pragma once

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <vector>

#include "tetforge/mesh.hpp"
#include "tetforge/quality.hpp"
#include "tetforge/topology.hpp"

namespace tetforge {

/// Local optimization unit: the free vertices and every tet touching one.
struct Patch {
  std::vector<Index> seed_tets;      // below-target tets that produced the patch
  std::vector<Index> free_vertices;  // sorted
  std::vector<Index> ring_tets;      // sorted; all tets incident to a free vertex
  double seed_quality = 0.0;         // worst seed quality at selection time
};

enum class PatchMode { Selective, AllPatches };

struct PatchOptions {
  bool surface_motion = true;
  /// Merged components larger than this are split into connected chunks.
  std::size_t max_free_vertices = 48;
};

inline bool is_movable(const TetMesh& mesh, Index v, bool surface_motion) {
  switch (mesh.vertex_class[v]) {
    case VertexClass::Interior: return true;
    case VertexClass::SurfaceSmooth:
    case VertexClass::FeatureEdge: return surface_motion;
    default: return false;
  }
}

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), Index{0}); }

  Index find(Index x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<Index> parent_;
};

// Splits a vertex set into breadth-first connected chunks of bounded size.
inline std::vector<std::vector<Index>> chunk_vertices(const TetMesh& mesh, const AdjacencyIndex& adj,
                                                      const std::vector<Index>& verts, std::size_t cap,
                                                      std::vector<int>& scratch) {
  std::vector<std::vector<Index>> chunks;
  for (Index v : verts) scratch[v] = 1;  // 1 = in set, unassigned
  for (Index start : verts) {
    if (scratch[start] != 1) continue;
    std::vector<Index> chunk;
    std::deque<Index> queue{start};
    scratch[start] = 2;
    while (!queue.empty() && chunk.size() < cap) {
      const Index v = queue.front();
      queue.pop_front();
      chunk.push_back(v);
      for (Index t : adj.vertex_tets[v])
        for (Index w : mesh.tets[t])
          if (scratch[w] == 1) {
            scratch[w] = 2;
            queue.push_back(w);
          }
    }
    for (Index w : queue) scratch[w] = 1;  // return unvisited frontier to the pool
    std::sort(chunk.begin(), chunk.end());
    chunks.push_back(std::move(chunk));
  }
  for (Index v : verts) scratch[v] = 0;
  return chunks;
}

}  // namespace detail

/// Builds the patches for one pass. Seeds sharing a movable vertex are merged
/// so free-vertex sets are pairwise disjoint. Patches come back ordered by
/// ascending seed quality.
inline std::vector<Patch> select_patches(const TetMesh& mesh, const AdjacencyIndex& adj, double target_quality,
                                         PatchMode mode, const PatchOptions& opts = {}) {
  const std::size_t nv = mesh.vertices.size();
  std::vector<double> quality(mesh.tets.size());
  std::vector<Index> seeds;
  for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
    quality[t] = volume_length_quality(mesh.tet_points(t));
    if (mode == PatchMode::AllPatches || quality[t] < target_quality) seeds.push_back(static_cast<Index>(t));
  }
  if (seeds.empty()) return {};

  detail::DisjointSets sets(nv);
  std::vector<char> free(nv, 0);
  for (Index t : seeds) {
    Index first = -1;
    for (Index v : mesh.tets[t]) {
      if (!is_movable(mesh, v, opts.surface_motion)) continue;
      free[v] = 1;
      if (first < 0)
        first = v;
      else
        sets.unite(first, v);
    }
  }

  // Component root -> vertices, in ascending vertex order.
  std::vector<std::vector<Index>> comp_vertices;
  std::vector<int> comp_of_root(nv, -1);
  for (std::size_t v = 0; v < nv; ++v) {
    if (!free[v]) continue;
    const Index r = sets.find(static_cast<Index>(v));
    if (comp_of_root[r] < 0) {
      comp_of_root[r] = static_cast<int>(comp_vertices.size());
      comp_vertices.emplace_back();
    }
    comp_vertices[comp_of_root[r]].push_back(static_cast<Index>(v));
  }

  std::vector<std::vector<Index>> groups;
  std::vector<int> scratch(nv, 0);
  for (auto& verts : comp_vertices) {
    if (verts.size() <= opts.max_free_vertices)
      groups.push_back(std::move(verts));
    else
      for (auto& c : detail::chunk_vertices(mesh, adj, verts, opts.max_free_vertices, scratch))
        groups.push_back(std::move(c));
  }

  std::vector<int> group_of(nv, -1);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (Index v : groups[g]) group_of[v] = static_cast<int>(g);

  std::vector<Patch> patches(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    patches[g].free_vertices = groups[g];
    patches[g].seed_quality = std::numeric_limits<double>::infinity();
  }
  for (Index t : seeds) {
    int last = -1;
    for (Index v : mesh.tets[t]) {
      const int g = group_of[v];
      if (g < 0 || g == last) continue;
      auto& p = patches[g];
      if (p.seed_tets.empty() || p.seed_tets.back() != t) {
        p.seed_tets.push_back(t);
        p.seed_quality = std::min(p.seed_quality, quality[t]);
      }
      last = g;
    }
  }
  for (auto& p : patches) {
    for (Index v : p.free_vertices) p.ring_tets.insert(p.ring_tets.end(), adj.vertex_tets[v].begin(), adj.vertex_tets[v].end());
    std::sort(p.ring_tets.begin(), p.ring_tets.end());
    p.ring_tets.erase(std::unique(p.ring_tets.begin(), p.ring_tets.end()), p.ring_tets.end());
  }
  std::stable_sort(patches.begin(), patches.end(),
                   [](const Patch& a, const Patch& b) { return a.seed_quality < b.seed_quality; });
  return patches;
}

/// Patch over an explicit set of free vertices (used by tests and tools).
inline Patch make_patch(const AdjacencyIndex& adj, std::vector<Index> free_vertices) {
  Patch p;
  std::sort(free_vertices.begin(), free_vertices.end());
  p.free_vertices = std::move(free_vertices);
  for (Index v : p.free_vertices) p.ring_tets.insert(p.ring_tets.end(), adj.vertex_tets[v].begin(), adj.vertex_tets[v].end());
  std::sort(p.ring_tets.begin(), p.ring_tets.end());
  p.ring_tets.erase(std::unique(p.ring_tets.begin(), p.ring_tets.end()), p.ring_tets.end());
  return p;
}

}  // namespace tetforge
