#pragma once

#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "tetforge/error.hpp"
#include "tetforge/mesh.hpp"
#include "tetforge/patch.hpp"
#include "tetforge/topology.hpp"

namespace tetforge {

/// Area-weighted outward normal at a surface vertex. For a FeatureEdge
/// vertex `group_normals` holds one unit normal per side of the crease;
/// otherwise it holds unit_n alone.
struct VertexNormal {
  Index vertex = -1;
  Vec3 N = Vec3::Zero();  // sum of incident triangle area vectors
  Vec3 unit_n = Vec3::Zero();
  std::vector<Vec3> group_normals;
};

inline VertexNormal vertex_normal(Index v, const TetMesh& mesh, const AdjacencyIndex& adj) {
  const auto& tris = adj.vertex_tris[v];
  if (tris.empty()) throw InvalidArgument("vertex " + std::to_string(v) + " is not on the surface");
  const double tol = 1e-14 * adj.scale * adj.scale;

  VertexNormal out;
  out.vertex = v;
  std::vector<Vec3> groups;
  for (std::size_t i = 0; i < tris.size(); ++i) {
    const Tri& c = mesh.surface_tris[tris[i]];
    const Vec3 a = triangle_area_vector(mesh.vertices[c[0]], mesh.vertices[c[1]], mesh.vertices[c[2]]);
    out.N += a;
    const std::size_t g = adj.tri_group[v].empty() ? 0 : adj.tri_group[v][i];
    if (groups.size() <= g) groups.resize(g + 1, Vec3::Zero());
    groups[g] += a;
  }
  const double len = out.N.norm();
  if (!(len > tol)) throw DegenerateNormal("degenerate normal at vertex " + std::to_string(v), v);
  out.unit_n = out.N / len;

  if (mesh.vertex_class[v] == VertexClass::FeatureEdge && groups.size() == 2) {
    for (const auto& g : groups) {
      const double gl = g.norm();
      if (!(gl > tol)) throw DegenerateNormal("degenerate crease normal at vertex " + std::to_string(v), v);
      out.group_normals.push_back(g / gl);
    }
  } else {
    out.group_normals.push_back(out.unit_n);
  }
  return out;
}

/// Linearized surface constraints C dX = g over the patch DOFs. Each row
/// reads n . dX_v = c1 - X_v . n for one (vertex, unit normal) pair.
struct ConstraintSystem {
  Eigen::MatrixXd C;
  Eigen::VectorXd g;
  Eigen::VectorXd c1;
  std::vector<Index> row_vertex;
  std::vector<Vec3> row_normal;
  /// Free surface vertices whose normal degenerated; the caller must pin them.
  std::vector<Index> demoted;

  Eigen::Index rows() const { return C.rows(); }
};

/// One row per free SurfaceSmooth vertex, two per free FeatureEdge vertex.
/// c1 is captured from the current coordinates, so g is zero on return.
inline ConstraintSystem build_constraints(const Patch& patch, const TetMesh& mesh, const AdjacencyIndex& adj) {
  ConstraintSystem cs;
  const auto n = static_cast<Eigen::Index>(3 * patch.free_vertices.size());
  std::vector<std::pair<int, Vec3>> rows;  // (local vertex, normal)
  for (std::size_t k = 0; k < patch.free_vertices.size(); ++k) {
    const Index v = patch.free_vertices[k];
    const auto cls = mesh.vertex_class[v];
    if (cls != VertexClass::SurfaceSmooth && cls != VertexClass::FeatureEdge) continue;
    try {
      const VertexNormal vn = vertex_normal(v, mesh, adj);
      for (const auto& u : vn.group_normals) rows.emplace_back(static_cast<int>(k), u);
    } catch (const DegenerateNormal&) {
      cs.demoted.push_back(v);
    }
  }
  const auto m = static_cast<Eigen::Index>(rows.size());
  cs.C = Eigen::MatrixXd::Zero(m, n);
  cs.g = Eigen::VectorXd::Zero(m);
  cs.c1 = Eigen::VectorXd::Zero(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto& [k, u] = rows[r];
    const Index v = patch.free_vertices[k];
    cs.C.block<1, 3>(r, 3 * k) = u.transpose();
    cs.c1[r] = mesh.vertices[v].dot(u);
    cs.row_vertex.push_back(v);
    cs.row_normal.push_back(u);
  }
  return cs;
}

/// Recomputes g = c1 - X . n at the current coordinates (normals frozen).
inline void update_constraint_residual(ConstraintSystem& cs, const TetMesh& mesh) {
  for (Eigen::Index r = 0; r < cs.rows(); ++r)
    cs.g[r] = cs.c1[r] - mesh.vertices[cs.row_vertex[r]].dot(cs.row_normal[r]);
}

struct ProjectedSystem {
  Eigen::MatrixXd S;  // S' = C^T C + Q^T S Q
  Eigen::VectorXd f;  // f' = C^T g + Q^T (f - S R g)
  Eigen::MatrixXd Q;  // I - C^T (C C^T)^-1 C
  Eigen::MatrixXd R;  // C^T (C C^T)^-1
  Eigen::MatrixXd C;  // rows kept after deduplication
  Eigen::VectorXd g;
  std::vector<Eigen::Index> kept_rows;
  int dropped_rows = 0;
};

/// Null-space projection of the Newton system onto the constraint set.
/// Linearly dependent rows (pivot below 1e-10 after orthogonalizing against
/// the rows already kept) are dropped and counted.
///
/// The solution of S' dX = -f' satisfies C dX = -g; callers wanting
/// C dX = g pass -g.
inline ProjectedSystem project_system(const Eigen::MatrixXd& S, const Eigen::VectorXd& f, const Eigen::MatrixXd& C,
                                      const Eigen::VectorXd& g) {
  const Eigen::Index n = S.rows();
  if (S.cols() != n || f.size() != n || (C.rows() > 0 && C.cols() != n) || g.size() != C.rows())
    throw InvalidArgument("project_system: dimension mismatch");

  ProjectedSystem out;
  // Row deduplication by modified Gram-Schmidt.
  std::vector<Eigen::VectorXd> basis;
  for (Eigen::Index r = 0; r < C.rows(); ++r) {
    Eigen::VectorXd w = C.row(r).transpose();
    const double norm0 = w.norm();
    if (norm0 == 0.0) {
      ++out.dropped_rows;
      continue;
    }
    for (const auto& e : basis) w -= e.dot(w) * e;
    const double piv = w.norm() / norm0;
    if (piv < 1e-10) {
      ++out.dropped_rows;
      continue;
    }
    basis.push_back(w / w.norm());
    out.kept_rows.push_back(r);
  }
  const auto m = static_cast<Eigen::Index>(out.kept_rows.size());
  out.C.resize(m, n);
  out.g.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    out.C.row(i) = C.row(out.kept_rows[i]);
    out.g[i] = g[out.kept_rows[i]];
  }

  if (m == 0) {
    out.S = S;
    out.f = f;
    out.Q = Eigen::MatrixXd::Identity(n, n);
    out.R = Eigen::MatrixXd::Zero(n, 0);
    return out;
  }

  const Eigen::MatrixXd cct = out.C * out.C.transpose();
  const Eigen::LLT<Eigen::MatrixXd> llt(cct);
  if (llt.info() != Eigen::Success) throw NoProgress("constraint Gram matrix is not positive definite");
  const Eigen::MatrixXd cct_inv_c = llt.solve(out.C);  // (C C^T)^-1 C
  out.R = cct_inv_c.transpose();
  out.Q = Eigen::MatrixXd::Identity(n, n) - out.C.transpose() * cct_inv_c;
  out.S = out.C.transpose() * out.C + out.Q.transpose() * S * out.Q;
  out.f = out.C.transpose() * out.g + out.Q.transpose() * (f - S * (out.R * out.g));
  return out;
}

}  // namespace tetforge
