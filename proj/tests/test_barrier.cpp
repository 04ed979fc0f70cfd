#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace tetforge;
using namespace tetforge::testing;

TEST(Barrier, Gamma) {
  EXPECT_NEAR(compute_gamma(0.3, 0.8), 0.24, 1e-15);
  EXPECT_NEAR(compute_gamma(0.0, 0.8), -0.2, 1e-15);
  EXPECT_LT(compute_gamma(0.0, 0.8), 0.0);
  EXPECT_NEAR(compute_gamma(-0.5, 0.8), -0.625, 1e-15);
  for (double q : {-0.9, -0.1, 0.0, 0.05, 0.7, 1.0}) EXPECT_LT(compute_gamma(q, 0.95), q);
  EXPECT_THROW(compute_gamma(0.3, 1.0), InvalidArgument);
  EXPECT_THROW(compute_gamma(0.3, 0.0), InvalidArgument);
}

TEST(Barrier, Values) {
  EXPECT_NEAR(barrier_value(1.0, 0.8), 2.5 - std::log(0.2), 1e-12);
  EXPECT_NEAR(barrier_value(1.0, 0.8), 4.109438, 5e-7);
  EXPECT_NEAR(barrier_value(0.9, 0.72), 0.81 / 0.56 - std::log(0.18), 1e-12);
  EXPECT_NEAR(barrier_value(0.9, 0.72), 3.161227, 5e-7);
  EXPECT_THROW(barrier_value(0.5, 0.5), BarrierViolation);
  EXPECT_THROW(barrier_value(0.4, 0.5), BarrierViolation);
}

TEST(Barrier, BlowsUpAtGamma) {
  double prev = -INFINITY;
  for (int k = 1; k <= 8; ++k) {
    const double v = barrier_value(0.3 + std::pow(10.0, -k), 0.3);
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_GT(prev, 18.0);
}

TEST(Barrier, DecreasingBelowOptimum) {
  // dI/dq = q/(1-g) - 1/(q-g) < 0 for q in (g, 1]: better quality, lower barrier.
  for (double g : {-0.5, 0.0, 0.3, 0.7})
    for (double q = g + 0.01; q < 1.0; q += 0.01) EXPECT_GT(barrier_value(q, g), barrier_value(q + 0.01, g));
}

TEST(Barrier, RegularTetGradientVanishesAtGamma08) {
  const auto e = barrier_grad_hess(volume_length_diff(regular_tet()), 0.8);
  EXPECT_LT(e.grad.norm(), 1e-12);
}

TEST(Barrier, GradientParallelToQualityGradient) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 10; ++i) {
    const auto qd = volume_length_diff(random_tet(rng));
    const auto e = barrier_grad_hess(qd, 0.5 * qd.q);
    const double c = qd.q / (1 - 0.5 * qd.q) - 1 / (0.5 * qd.q);
    EXPECT_LT((e.grad - c * qd.grad).norm(), 1e-12 * (1 + e.grad.norm()));
  }
}

TEST(Barrier, ElementDerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(5);
  for (ObjectiveKind kind : {ObjectiveKind::LogBarrier, ObjectiveKind::SquaredLogBarrier})
    for (int i = 0; i < 10; ++i) {
      const auto p = random_tet(rng);
      const double gamma = 0.6 * volume_length_quality(p) - 0.1 * i / 10.0;
      auto value = [&](const Eigen::VectorXd& y) {
        const double b = barrier_value(volume_length_quality(unpack(y)), gamma);
        return kind == ObjectiveKind::LogBarrier ? b : b * b;
      };
      auto grad = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
        return element_objective(volume_length_diff(unpack(y)), gamma, kind).grad;
      };
      const auto e = element_objective(volume_length_diff(p), gamma, kind);
      const Vec12 x = pack(p);
      EXPECT_NEAR(e.value, value(x), 1e-12 * std::abs(e.value));
      EXPECT_LT(rel_err(e.grad, fd_gradient(value, x, 2e-6)), 1e-6);
      EXPECT_LT(rel_err(e.hess, fd_jacobian(grad, x, 2e-6)), 1e-4);
    }
}

TEST(Barrier, AllFixedPatchIsEmpty) {
  const TetMesh m = octahedron_star();
  Patch p;
  p.ring_tets = {0, 1, 2};
  const auto sys = assemble_patch_system(m, p, BarrierParams::from_quality(min_quality(m), 0.75));
  EXPECT_EQ(sys.size(), 0);
  EXPECT_GT(sys.objective, 0.0);
}

TEST(Barrier, AssemblySumsElementBlocks) {
  TetMesh m = octahedron_star(Vec3(0.1, -0.05, 0.2));
  // Drop four of the eight tets: one free vertex with four incident tets.
  m.tets.resize(4);
  m.fill_attributes();
  Patch p;
  p.free_vertices = {0};
  p.ring_tets = {0, 1, 2, 3};
  const auto params = BarrierParams::from_quality(min_quality(m), 0.75);
  const auto sys = assemble_patch_system(m, p, params);
  ASSERT_EQ(sys.S.rows(), 3);
  Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
  Eigen::Vector3d f = Eigen::Vector3d::Zero();
  for (Index t : p.ring_tets) {
    const auto e = element_objective(volume_length_diff(m.tet_points(t)), params.gamma, params.kind);
    const int local = static_cast<int>(std::find(m.tets[t].begin(), m.tets[t].end(), 0) - m.tets[t].begin());
    S += e.hess.block<3, 3>(3 * local, 3 * local);
    f += e.grad.segment<3>(3 * local);
  }
  EXPECT_LT((sys.S - S).norm(), 1e-12 * S.norm());
  EXPECT_LT((sys.f - f).norm(), 1e-12 * (1 + f.norm()));
}

TEST(Barrier, AssembledGradientMatchesFiniteDifferences) {
  TetMesh m = generate_test_mesh({FixtureKind::Grid, 3, 0, 0.3}, 9);
  const auto adj = build_topology(m);
  const Patch p = make_patch(adj, {21, 22, 25});
  const auto params = BarrierParams::from_quality(min_quality(m), 0.8);
  const auto sys = assemble_patch_system(m, p, params);
  Eigen::VectorXd x(9);
  for (int k = 0; k < 3; ++k) x.segment<3>(3 * k) = m.vertices[p.free_vertices[k]];
  auto objective = [&](const Eigen::VectorXd& y) {
    TetMesh c = m;
    for (int k = 0; k < 3; ++k) c.vertices[p.free_vertices[k]] = y.segment<3>(3 * k);
    double v = 0;
    EXPECT_TRUE(patch_objective(c, p, params, v));
    return v;
  };
  EXPECT_NEAR(objective(x), sys.objective, 1e-12 * sys.objective);
  EXPECT_LT(rel_err(sys.f, fd_gradient(objective, x, 1e-6)), 1e-6);
}

TEST(Barrier, AssemblyThrowsBelowBarrier) {
  const TetMesh m = octahedron_star();
  Patch p;
  p.free_vertices = {0};
  p.ring_tets = {0, 1, 2, 3, 4, 5, 6, 7};
  BarrierParams params = BarrierParams::from_quality(min_quality(m), 0.75);
  params.gamma = 0.9;
  EXPECT_THROW(assemble_patch_system(m, p, params), BarrierViolation);
}
