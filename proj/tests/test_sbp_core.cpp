#include "alesbp/sbp_core.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace alesbp;

namespace {

Vec monomial(const Vec& x, int k) { return x.array().pow(k).matrix(); }

Vec monomial_derivative(const Vec& x, int k) {
  if (k == 0) return Vec::Zero(x.size());
  return (k * x.array().pow(k - 1)).matrix();
}

MultiblockOperator two_equal_blocks(SbpOrder o, int n) {
  const auto left = build_operator(o, n, 0.1, -1.0);
  const auto right = build_operator(o, n, 0.1, left.x_end());
  return couple_blocks(left, right);
}

}  // namespace

TEST(SbpCore, SecondOrderThreeNodes) {
  const auto op = build_operator(SbpOrder::Order21, 3, 1.0);
  EXPECT_DOUBLE_EQ(op.P[0], 0.5);
  EXPECT_DOUBLE_EQ(op.P[1], 1.0);
  EXPECT_DOUBLE_EQ(op.P[2], 0.5);
  const Mat D(op.D);
  Mat expected(3, 3);
  expected << -1, 1, 0, -0.5, 0, 0.5, 0, -1, 1;
  EXPECT_LE((D - expected).cwiseAbs().maxCoeff(), 1e-15);
  const Mat Q = op.P.asDiagonal() * D;
  const Mat sym = Q + Q.transpose();
  Mat b = Mat::Zero(3, 3);
  b(0, 0) = -1;
  b(2, 2) = 1;
  EXPECT_LE((sym - b).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SbpCore, FourthOrderNormWeights) {
  const auto op = build_operator(SbpOrder::Order42, 12, 1.0);
  const double w[4] = {17.0 / 48, 59.0 / 48, 43.0 / 48, 49.0 / 48};
  for (int i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(op.P[i], w[i]);
    EXPECT_DOUBLE_EQ(op.P[11 - i], w[i]);
  }
  for (int i = 4; i < 8; ++i) EXPECT_DOUBLE_EQ(op.P[i], 1.0);
  EXPECT_TRUE((op.P.array() > 0).all());
}

TEST(SbpCore, TooFewNodesNamesMinimum) {
  try {
    build_operator(SbpOrder::Order42, 7, 0.1);
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find('8'), std::string::npos) << e.what();
  }
  EXPECT_THROW(build_operator(SbpOrder::Order21, 1, 0.1), InvalidArgument);
  EXPECT_THROW(build_operator(SbpOrder::Order21, 4, 0.0), InvalidArgument);
  EXPECT_NO_THROW(build_operator(SbpOrder::Order42, 8, 0.1));
}

TEST(SbpCore, ConsistencyAndResidual) {
  for (SbpOrder o : {SbpOrder::Order21, SbpOrder::Order42})
    for (int n : {8, 9, 17, 40}) {
      const auto op = build_operator(o, n, 0.37, 1.5);
      EXPECT_LE(max_abs(Vec(op.D * Vec::Ones(n))), 1e-12) << to_string(o) << " n=" << n;
      EXPECT_LE(sbp_residual(op), 1e-13);
    }
  EXPECT_LE(sbp_residual(build_operator(SbpOrder::Order21, 10, 0.2)), 1e-15);
}

TEST(SbpCore, ResidualDetectsSymmetricPerturbation) {
  auto op = build_operator(SbpOrder::Order21, 10, 0.2);
  op.Q.coeffRef(0, 0) += 1e-3;
  EXPECT_NEAR(sbp_residual(op), 2e-3, 1e-15);
}

TEST(SbpCore, FourthOrderLinearExactIncludingClosures) {
  const auto op = build_operator(SbpOrder::Order42, 20, 0.05, -0.3);
  const Vec x = op.nodes();
  EXPECT_LE(max_abs(Vec(op.D * x - Vec::Ones(20))), 1e-13);
}

TEST(SbpCore, PolynomialExactnessSweep) {
  const int closure[2] = {1, 4};
  for (SbpOrder o : {SbpOrder::Order21, SbpOrder::Order42}) {
    const int n = 24;
    const auto op = build_operator(o, n, 1.0 / (n - 1), 0.2);
    const Vec x = op.nodes();
    const int w = closure[o == SbpOrder::Order42];
    for (int k = 0; k <= op.order_interior(); ++k) {
      const Vec err = op.D * monomial(x, k) - monomial_derivative(x, k);
      const double scale = std::max(1.0, max_abs(monomial_derivative(x, k)));
      for (int i = 0; i < n; ++i) {
        const bool closure_row = i < w || i >= n - w;
        if (closure_row && k > op.order_boundary()) continue;
        EXPECT_LE(std::abs(err[i]), 1e-12 * scale) << to_string(o) << " degree " << k << " row " << i;
      }
    }
    // The closures must not be exact one degree above their order.
    const Vec err = op.D * monomial(x, op.order_boundary() + 1) - monomial_derivative(x, op.order_boundary() + 1);
    EXPECT_GT(std::abs(err[0]), 1e-8);
  }
}

TEST(SbpCore, InnerProductProperty) {
  std::mt19937 rng(7);
  for (SbpOrder o : {SbpOrder::Order21, SbpOrder::Order42}) {
    const auto single = build_operator(o, 15, 0.3);
    const auto multi = two_equal_blocks(o, 11);
    for (int trial = 0; trial < 20; ++trial) {
      for (int which = 0; which < 2; ++which) {
        const Vec& P = which ? multi.P : single.P;
        const SpMat& D = which ? multi.D : single.D;
        const int n = static_cast<int>(P.size());
        const Vec phi = oracle::random_vec(n, rng), psi = oracle::random_vec(n, rng);
        const double lhs = inner(phi, D * psi, P) + inner(D * phi, psi, P);
        const double rhs = phi[n - 1] * psi[n - 1] - phi[0] * psi[0];
        EXPECT_LE(std::abs(lhs - rhs), 1e-12 * phi.norm() * psi.norm());
      }
    }
  }
}

TEST(SbpCore, RestrictionRows) {
  const auto e = end_points(9);
  const Mat m(e.matrix());
  EXPECT_EQ(m.rows(), 2);
  for (int r = 0; r < 2; ++r) {
    EXPECT_DOUBLE_EQ(m.row(r).sum(), 1.0);
    EXPECT_DOUBLE_EQ(m.row(r).cwiseAbs().maxCoeff(), 1.0);
  }
  EXPECT_LE((m * m.transpose() - Mat::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.0);
  Vec v = Vec::LinSpaced(9, 0, 8);
  EXPECT_EQ(e.apply(v), (Vec(2) << 0, 8).finished());
  EXPECT_EQ(Vec(m.transpose() * e.apply(v)), e.apply_transpose(e.apply(v)));
}

TEST(SbpCore, TwoBlockCoupling) {
  for (SbpOrder o : {SbpOrder::Order21, SbpOrder::Order42}) {
    const auto mb = two_equal_blocks(o, 12);
    EXPECT_EQ(mb.n, 24);
    EXPECT_LE(sbp_residual(mb), 1e-13);
    EXPECT_LE(max_abs(Vec(mb.D * Vec::Ones(mb.n))), 1e-12);
    EXPECT_LE(max_abs(Vec(mb.D * mb.nodes() - Vec::Ones(mb.n))), 1e-13);
    EXPECT_EQ(mb.block_of(11), 0);
    EXPECT_EQ(mb.block_of(12), 1);
  }
}

TEST(SbpCore, TwoBlockUnequalSpacing) {
  const auto left = build_operator(SbpOrder::Order42, 17, 5.0 / 16, -3.0);
  const auto right = build_operator(SbpOrder::Order42, 17, 1.0 / 16, left.x_end());
  const auto mb = couple_blocks(left, right);
  EXPECT_LE(sbp_residual(mb), 1e-13);
  EXPECT_LE(max_abs(Vec(mb.D * mb.nodes() - Vec::Ones(mb.n))), 1e-12);
}

TEST(SbpCore, CouplingAddsNoInteriorSymmetricPart) {
  const auto left = build_operator(SbpOrder::Order42, 10, 0.2, 0.0);
  const auto right = build_operator(SbpOrder::Order42, 10, 0.2, left.x_end());
  const Mat q(couple_blocks(left, right).Q);
  const Mat s = q + q.transpose();
  Mat b = Mat::Zero(20, 20);
  b(0, 0) = -1;
  b(19, 19) = 1;
  EXPECT_LE((s - b).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SbpCore, NonConservativePenaltyBreaksStructure) {
  const auto left = build_operator(SbpOrder::Order21, 6, 0.2, 0.0);
  const auto right = build_operator(SbpOrder::Order21, 6, 0.2, left.x_end());
  EXPECT_GT(sbp_residual(couple_blocks(left, right, {-0.3, 0.5})), 0.1);
}

TEST(SbpCore, CouplingRejectsGap) {
  const auto left = build_operator(SbpOrder::Order21, 6, 0.2, 0.0);
  const auto right = build_operator(SbpOrder::Order21, 6, 0.2, left.x_end() + 1e-6);
  EXPECT_THROW(couple_blocks(left, right), InvalidArgument);
}

TEST(SbpCore, ParseOrder) {
  EXPECT_EQ(parse_order("4,2"), SbpOrder::Order42);
  EXPECT_EQ(parse_order("2,1"), SbpOrder::Order21);
  EXPECT_THROW(parse_order("6,3"), InvalidArgument);
}
