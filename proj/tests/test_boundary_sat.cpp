#include "alesbp/advection_diffusion.hpp"
#include "alesbp/boundary_sat.hpp"
#include "oracles.hpp"

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

Vec row(const SpMat& m, int r) { return Mat(m).row(r).transpose(); }

Vec unit(int n, int i) {
  Vec e = Vec::Zero(n);
  e[i] = 1.0;
  return e;
}

}  // namespace

TEST(BoundarySat, PureAdvectionInflowRow) {
  const auto model = model_for(8);
  const SpMat D = model.dx(0.0);
  const int n = model.size();
  const auto bc = make_model_bcs(D, 0.0, 0.0, 0.0);
  EXPECT_EQ(row(bc.B, 0), Vec(-unit(n, 0)));
  EXPECT_EQ(row(bc.B, 1), unit(n, n - 1));
  EXPECT_EQ(row(bc.delta, 0), unit(n, 0));
}

TEST(BoundarySat, StationaryLiftingRow) {
  const auto model = model_for(8, false);
  const SpMat D = model.dx(0.0);
  const int n = model.size();
  const double eps = model.epsilon();
  const auto bc = model.boundary_operators(0.0);
  const Vec expected = -eps * row(D, n - 1) + 0.5 * unit(n, n - 1);
  EXPECT_LE(max_abs(Vec(row(bc.delta, 1) - expected)), 1e-14);
  const Vec b0 = eps * row(D, 0) - unit(n, 0);
  EXPECT_LE(max_abs(Vec(row(bc.B, 0) - b0)), 1e-14);
}

TEST(BoundarySat, QuarterPeriodMatchesStationaryForm) {
  // cos(pi/2) = 0 makes both boundary velocities vanish.
  const auto moving = model_for(8);
  const double t = pi / 2;
  const auto m = moving.motion().sample(t);
  EXPECT_NEAR(m.traj.xs_dot, 0.0, 1e-15);
  const SpMat D = moving.dx(t);
  const auto bc = moving.boundary_operators(t);
  const auto ref = make_model_bcs(D, moving.epsilon(), 0.0, 0.0);
  EXPECT_LE(max_abs(Mat(Mat(bc.B) - Mat(ref.B))), 1e-14);
  EXPECT_LE(max_abs(Mat(Mat(bc.delta) - Mat(ref.delta))), 1e-14);
}

TEST(BoundarySat, OutflowAtInflowEndRejected) {
  const auto model = model_for(8);
  EXPECT_THROW(make_model_bcs(model.dx(0.0), 0.1, 1.2, 0.0), InvalidArgument);
  EXPECT_NO_THROW(make_model_bcs(model.dx(0.0), 0.1, 1.0, 0.0));
}

TEST(BoundarySat, LiftingAdjoint) {
  std::mt19937 rng(21);
  const auto model = model_for(16);
  for (double t : {0.0, 0.8, 2.5}) {
    const auto bc = model.boundary_operators(t);
    const Vec P = model.quadrature(t);
    const Vec ws = Vec::Ones(2);
    const auto lift = make_lifting(bc.delta, P, ws);
    EXPECT_EQ(lifting_apply(lift, Vec::Zero(2)), Vec::Zero(model.size()));
    for (int k = 0; k < 5; ++k) {
      const Vec phi = oracle::random_vec(model.size(), rng);
      const Vec psi = oracle::random_vec(2, rng);
      const double lhs = inner(phi, lifting_apply(lift, psi), P);
      const double rhs = inner(Vec(bc.delta * phi), psi, ws);
      EXPECT_LE(std::abs(lhs - rhs), 1e-13 * std::max(1.0, std::abs(rhs)) * 10);
    }
  }
}

TEST(BoundarySat, SingleNodeLifting) {
  const int n = 6;
  SpMat delta(1, n);
  delta.insert(0, 0) = 1.0;
  const Vec P = Vec::LinSpaced(n, 0.5, 1.5);
  Vec ws(1);
  ws << 0.7;
  const auto lift = make_lifting(delta, P, ws);
  Vec psi(1);
  psi << 2.0;
  const Vec out = lifting_apply(lift, psi);
  EXPECT_DOUBLE_EQ(out[0], 2.0 * 0.7 / P[0]);
  for (int i = 1; i < n; ++i) EXPECT_EQ(out[i], 0.0);
}

TEST(BoundarySat, EnergyClosedForm) {
  std::mt19937 rng(17);
  for (bool moving : {false, true}) {
    const auto model = model_for(16, moving);
    for (int k = 0; k < 12; ++k) {
      const double t = 2 * pi * k / 12;
      const auto m = model.motion().sample(t);
      const SpMat D = model.dx(t);
      const auto bc = model.boundary_operators(t);
      const Vec P = model.quadrature(t);
      const auto surf = model.surface(t);
      EXPECT_EQ(energy_functional(model.spatial_operator(t), bc, P, surf, Vec::Zero(model.size())), 0.0);
      const Vec phi = oracle::random_vec(model.size(), rng);
      const double e = energy_functional(model.spatial_operator(t), bc, P, surf, phi);
      // Closed form evaluated from scratch.
      const Vec dphi = D * phi;
      const double closed =
          -model.epsilon() * (dphi.array().square() * P.array()).sum() - 0.5 * (1 - m.traj.xs_dot) * phi[0] * phi[0];
      EXPECT_LE(std::abs(e - closed), 1e-11 * std::abs(closed));
      EXPECT_NEAR(model_bc_energy_closed_form(D, P, model.epsilon(), m.traj.xs_dot, phi), closed, 1e-11 * std::abs(closed));
      EXPECT_LE(e, 0.0);
    }
  }
}

TEST(BoundarySat, ZeroDataConsistency) {
  // A state that satisfies B u = g feels no penalty, whatever delta is.
  const auto model = model_for(8);
  const double t = 1.1;
  const auto bc = model.boundary_operators(t);
  const Vec u = model.exact_solution(t);
  Vec g = bc.B * u;
  const Vec P = model.quadrature(t);
  const auto lift = make_lifting(bc.delta, P, Vec::Ones(2));
  EXPECT_LE(max_abs(lifting_apply(lift, Vec(bc.B * u - g))), 0.0);
}

TEST(BoundarySat, MatrixFreeRhsMatchesAssembledSystem) {
  std::mt19937 rng(2);
  const auto model = AdvectionDiffusionAle(TwoBlockMotion(layout_for_ratio(8), true), SbpOrder::Order42,
                                           ManufacturedSolution{}, Forcing::free_stream(0.0));
  for (double t : {0.0, 1.3, 4.4}) {
    const Vec u = oracle::random_vec(model.size(), rng);
    const Vec js = Vec::Ones(model.size());
    const auto ale = model.ale_operators(t);
    const Vec ref = model.system_matrix(t) * u + ale.Dm * u;
    EXPECT_LE(max_abs(Vec(model.rhs(t, js, u) - ref)), 1e-11 * max_abs(ref));
  }
}
