#include "alesbp/advection_diffusion.hpp"
#include "alesbp/stability_audit.hpp"
#include "alesbp/symmetric_eigen.hpp"
#include "oracles.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace alesbp;
using std::numbers::pi;

namespace {

AdvectionDiffusionAle model_for(int N, bool moving = true) {
  return AdvectionDiffusionAle(TwoBlockMotion(layout_for_ratio(N), moving), SbpOrder::Order42,
                               ManufacturedSolution{});
}

struct Snapshot {
  SystemMatrices sys;
  AleOperators ale;
  SurfaceTerms surf;
};

Snapshot snapshot(const AdvectionDiffusionAle& m, double t) {
  auto ale = m.ale_operators(t);
  auto sys = assemble(m.system_matrix(t), ale.Dm, ale.jsqrt);
  return {sys, ale, m.surface(t)};
}

}  // namespace

TEST(SymmetricEigen, SmallExamples) {
  Mat d = Mat::Zero(3, 3);
  d.diagonal() << 3, -1, 2;
  const Vec ev = symmetric_eigenvalues(d);
  EXPECT_EQ(ev, (Vec(3) << -1, 2, 3).finished());
  Mat a(2, 2);
  a << 2, 1, 1, 2;
  const Vec e2 = symmetric_eigenvalues(a);
  EXPECT_NEAR(e2[0], 1.0, 1e-14);
  EXPECT_NEAR(e2[1], 3.0, 1e-14);
}

TEST(SymmetricEigen, RejectsBadInput) {
  Mat a(2, 2);
  a << 1, 2, 3, 4;
  EXPECT_THROW(symmetric_eigen(a), InvalidArgument);
  EXPECT_THROW(symmetric_eigen(Mat::Zero(2, 3)), InvalidArgument);
  Mat hard = Mat::Random(12, 12);
  hard = hard + hard.transpose().eval();
  EXPECT_THROW(symmetric_eigen(hard, {1e-14, 1}), Error);
}

TEST(SymmetricEigen, OffDiagonalConverged) {
  std::mt19937 rng(4);
  const Mat s = oracle::random_symmetric(20, rng, 3.0);
  const auto r = symmetric_eigen(s);
  EXPECT_LE(r.off_norm, 1e-12 * s.norm());
  EXPECT_TRUE(std::is_sorted(r.values.data(), r.values.data() + r.values.size()));
  EXPECT_NEAR(r.values.sum(), s.trace(), 1e-12 * s.norm());
}

TEST(SymmetricEigen, MatchesCharacteristicPolynomialRoots) {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const Mat s = oracle::random_symmetric(8, rng, 5.0);
    const Vec ev = symmetric_eigenvalues(s);
    const auto roots = oracle::characteristic_roots(s);
    const double scale = ev.cwiseAbs().maxCoeff();
    for (int k = 0; k < 8; ++k) EXPECT_LE(std::abs(ev[k] - roots[static_cast<std::size_t>(k)]), 1e-9 * scale);
  }
}

TEST(SymmetricEigen, ClusteredSpectrum) {
  std::mt19937 rng(8);
  const Mat q = Eigen::HouseholderQR<Mat>(oracle::random_symmetric(10, rng)).householderQ();
  Vec lam(10);
  lam << -2, -2, -2 + 1e-9, 0, 0, 1e-12, 1, 1, 5, 5;
  const Mat s = q * lam.asDiagonal() * q.transpose();
  const Vec ev = symmetric_eigenvalues(0.5 * (s + s.transpose()));
  for (int k = 0; k < 10; ++k) EXPECT_NEAR(ev[k], lam[k], 1e-12);
}

TEST(StabilityAudit, NegativeIdentityOnStationaryMesh) {
  const auto model = model_for(8, false);
  auto snap = snapshot(model, 0.0);
  const int n = model.size();
  snap.sys = assemble(-Mat::Identity(n, n), snap.ale.Dm, snap.ale.jsqrt);
  const Vec P = snap.ale.P();
  const auto r = audit(snap.sys, snap.ale, snap.surf);
  EXPECT_NEAR(r.lambda_max_energy, -2.0 * P.minCoeff(), 1e-14);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.inertia_energy.negative, n);
}

TEST(StabilityAudit, SkewPartLeavesBoundaryTermOnly) {
  // M = P^{-1} Q on a stationary mesh: S = Q + Q^T = diag(-1, 0, ..., 0, 1).
  const auto op = build_operator(SbpOrder::Order42, 12, 0.2);
  const Mat M(op.D);
  AleOperators ale;
  ale.Dm = SpMat(12, 12);
  ale.jsqrt = Vec::Ones(12);
  ale.phat = op.P;
  ale.divx = Vec::Zero(12);
  const auto surf = surface_1d(12, 0.0, 0.0);
  const auto r = audit(assemble(M, ale.Dm, ale.jsqrt), ale, surf);
  EXPECT_NEAR(r.lambda_max_energy, 1.0, 1e-12);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.inertia_energy, (Inertia{1, 10, 1}));
}

TEST(StabilityAudit, ModelSchemeOverPeriod) {
  const auto model = model_for(8);
  for (int k = 0; k <= 6; ++k) {
    const double t = static_cast<double>(k);
    const auto s = snapshot(model, t);
    const auto r = audit(s.sys, s.ale, s.surf, 0.0, t);
    EXPECT_TRUE(r.pass) << "t=" << t << " lambda=" << r.lambda_max_energy;
    EXPECT_TRUE(r.inertia_match()) << "t=" << t;
    EXPECT_TRUE(inertia_equivalence(s.sys, s.ale, s.surf));
  }
}

TEST(StabilityAudit, CongruenceLaw) {
  const auto model = model_for(8);
  for (double t : {0.4, 2.0, 5.1}) {
    const auto s = snapshot(model, t);
    const Mat S = energy_matrix(s.sys.M, s.ale.P(), s.surf, 0.0);
    const Mat Sh = reference_matrix(s.sys.Mhat, s.ale.phat, 0.0);
    const Vec ij = s.ale.jsqrt.cwiseInverse();
    const Mat cong = ij.asDiagonal() * S * ij.asDiagonal();
    EXPECT_LE(max_abs(Mat(Sh - cong)), 1e-12 * max_abs(S));
  }
}

TEST(StabilityAudit, InertiaMatchesForIndefiniteSystem) {
  std::mt19937 rng(33);
  const auto model = model_for(8);
  for (double t : {0.5, 3.0}) {
    auto s = snapshot(model, t);
    const int n = model.size();
    Mat M = oracle::random_symmetric(n, rng);
    M += Mat(Mat::Random(n, n)) * 0.3;
    s.sys = assemble(M, s.ale.Dm, s.ale.jsqrt);
    const auto r = audit(s.sys, s.ale, s.surf, 0.0, t);
    EXPECT_GT(r.inertia_energy.positive, 0);
    EXPECT_GT(r.inertia_energy.negative, 0);
    EXPECT_TRUE(r.inertia_match());
  }
}

TEST(StabilityAudit, IdentityJacobianGivesIdenticalMatrices) {
  const auto model = model_for(8, false);
  const auto s = snapshot(model, 0.0);
  const Mat S = energy_matrix(s.sys.M, s.ale.P(), s.surf, 0.0);
  const Mat Sh = reference_matrix(s.sys.Mhat, s.ale.phat, 0.0);
  EXPECT_LE(max_abs(Mat(S - Sh)), 1e-13 * max_abs(S));
}

TEST(StabilityAudit, SpectrumInLeftHalfPlane) {
  const auto model = model_for(8);
  for (double t : {0.0, 1.5, 4.0}) {
    const auto s = snapshot(model, t);
    const auto r = audit(s.sys, s.ale, s.surf, 0.0, t);
    ASSERT_LE(r.lambda_max_ref, 1e-10 * r.norm_ref);
    Eigen::EigenSolver<Mat> es(s.sys.Mhat, false);
    EXPECT_LE(es.eigenvalues().real().maxCoeff(), 1e-9) << "t=" << t;
  }
}

TEST(StabilityAudit, AlphaShiftsSpectrum) {
  const auto model = model_for(8);
  const auto s = snapshot(model, 1.0);
  const auto r0 = audit(s.sys, s.ale, s.surf, 0.0);
  const auto r1 = audit(s.sys, s.ale, s.surf, -1.0);
  EXPECT_GT(r1.lambda_max_energy, r0.lambda_max_energy);
}
