#pragma once

// Moving-domain advection-diffusion model
//   u_t = eps u_xx - u_x + F,          x_s(t) < x < x_e(t)
//   eps u_x - (1 - xs_dot) u = g_s     at x = x_s(t)
//   u = g_e                            at x = x_e(t)
// on the two-block mesh, discretized with the encapsulated SBP operator Dx,
// D = eps Dx^2 - Dx, and the characteristic/Dirichlet SATs of boundary_sat.

#include "alesbp/ale_kernel.hpp"
#include "alesbp/boundary_sat.hpp"
#include "alesbp/error.hpp"
#include "alesbp/linalg.hpp"
#include "alesbp/mesh_motion.hpp"
#include "alesbp/sbp_core.hpp"
#include "alesbp/time_integrator.hpp"

#include <cmath>
#include <numbers>

namespace alesbp {

/// Time-periodic manufactured solution u = (1 + A sin(x - t))(1 - exp((x - x_e)/eps)).
struct ManufacturedSolution {
  double amplitude = 0.1;
  double epsilon = 0.1 * std::numbers::pi;

  double solution(double x, double t, double xe) const {
    return (1.0 + amplitude * std::sin(x - t)) * (1.0 - std::exp((x - xe) / epsilon));
  }

  double initial(double x, double xe0) const { return solution(x, 0.0, xe0); }

  double forcing(double x, double t, double xe, double xe_dot) const {
    const double a = amplitude, e = epsilon;
    const double s = std::sin(x - t), c = std::cos(x - t);
    const double layer = std::exp((x - xe) / e);
    return a * e * s + (xe_dot / e * (1.0 + a * s) + 2.0 * a * c - a * e * s) * layer;
  }

  double inflow_data(double t, const Trajectory& q) const {
    const double a = amplitude, e = epsilon;
    const double s = std::sin(q.xs - t), c = std::cos(q.xs - t);
    return -(1.0 + a * s) + (a * e * c + q.xs_dot * (1.0 + a * s)) * (1.0 - std::exp((q.xs - q.xe) / e));
  }
};

/// Data driving the model: the manufactured solution, or a free stream
/// u = u_inf with F = 0 and boundary data G = B (u_inf 1).
struct Forcing {
  enum class Kind { Manufactured, FreeStream };
  Kind kind = Kind::Manufactured;
  double u_inf = 1.0;

  static Forcing manufactured() { return {}; }
  static Forcing free_stream(double u) { return {Kind::FreeStream, u}; }
};

enum class DivergenceMode {
  Discrete,  // Dx Xdot
  Exact,     // analytic mesh-velocity divergence
};

class AdvectionDiffusionAle {
 public:
  AdvectionDiffusionAle(TwoBlockMotion motion, SbpOrder order, ManufacturedSolution mms,
                        Forcing forcing = Forcing::manufactured(),
                        DivergenceMode div_mode = DivergenceMode::Discrete)
      : motion_(std::move(motion)), mms_(mms), forcing_(forcing), div_mode_(div_mode) {
    const auto& l = motion_.layout();
    // Unit-spacing blocks; physical operators follow by scaling rows with 1/h.
    auto left = build_operator(order, l.left_nodes(), 1.0, 0.0);
    auto right = build_operator(order, l.right_nodes(), 1.0, static_cast<double>(l.left_spacings));
    unit_ = couple_blocks(left, right);
  }

  const TwoBlockMotion& motion() const { return motion_; }
  const MultiblockOperator& unit_operator() const { return unit_; }
  const ManufacturedSolution& mms() const { return mms_; }
  int size() const { return unit_.n; }
  double epsilon() const { return mms_.epsilon; }

  /// Physical quadrature diag(h) P_unit.
  Vec quadrature(double t) const { return motion_.spacing(t).cwiseProduct(unit_.P); }

  /// Physical first-derivative operator on the mesh at time t.
  SpMat dx(double t) const {
    SpMat d = diag_sparse(motion_.spacing(t).cwiseInverse()) * unit_.D;
    d.makeCompressed();
    return d;
  }

  Vec divergence(double t) const {
    if (div_mode_ == DivergenceMode::Exact) return motion_.exact_divergence(t);
    const Vec inv_h = motion_.spacing(t).cwiseInverse();
    return inv_h.cwiseProduct(unit_.D * motion_.sample(t).xdot);
  }

  Vec exact_jsqrt(double t) const { return motion_.jacobian(t).cwiseSqrt(); }

  Vec boundary_data(double t, const Trajectory& q) const {
    Vec g(2);
    if (forcing_.kind == Forcing::Kind::FreeStream) {
      g << -(1.0 - q.xs_dot) * forcing_.u_inf, forcing_.u_inf;
    } else {
      g << mms_.inflow_data(t, q), 0.0;
    }
    return g;
  }

  Vec source(double t, const MeshSample& m) const {
    Vec f = Vec::Zero(size());
    if (forcing_.kind == Forcing::Kind::FreeStream) return f;
    for (int i = 0; i < size(); ++i) f[i] = mms_.forcing(m.x[i], t, m.traj.xe, m.traj.xe_dot);
    return f;
  }

  /// RHS(sqrt(J), U, t) = sqrt(J) [D_m U + D U + L (B U - G) + F].
  Vec rhs(double t, const Vec& jsqrt, const Vec& u) const {
    const MeshSample m = motion_.sample(t);
    const Vec inv_h = motion_.spacing(t).cwiseInverse();
    const auto dxv = [&](const Vec& v) -> Vec { return inv_h.cwiseProduct(unit_.D * v); };
    const double eps = mms_.epsilon;
    const int e = size() - 1;

    const Vec d1 = dxv(u);
    Vec r = eps * dxv(d1) - d1;
    r += 0.5 * (m.xdot.cwiseProduct(d1) + dxv(m.xdot.cwiseProduct(u)));

    const Vec g = boundary_data(t, m.traj);
    const double psi_s = eps * d1[0] - (1.0 - m.traj.xs_dot) * u[0] - g[0];
    const double psi_e = u[e] - g[1];
    const Vec P = quadrature(t);
    r[0] += psi_s / P[0];
    for (SpMat::InnerIterator it(unit_.D, e); it; ++it)
      r[it.col()] += psi_e * (-eps * inv_h[e] * it.value()) / P[it.col()];
    r[e] += psi_e * 0.5 * (1.0 - m.traj.xe_dot) / P[e];

    r += source(t, m);
    return jsqrt.cwiseProduct(r);
  }

  Vec initial_condition() const {
    const MeshSample m = motion_.sample(0.0);
    if (forcing_.kind == Forcing::Kind::FreeStream) return Vec::Constant(size(), forcing_.u_inf);
    Vec u(size());
    for (int i = 0; i < size(); ++i) u[i] = mms_.initial(m.x[i], m.traj.xe);
    return u;
  }

  Vec exact_solution(double t) const {
    const MeshSample m = motion_.sample(t);
    if (forcing_.kind == Forcing::Kind::FreeStream) return Vec::Constant(size(), forcing_.u_inf);
    Vec u(size());
    for (int i = 0; i < size(); ++i) u[i] = mms_.solution(m.x[i], t, m.traj.xe);
    return u;
  }

  SolverState initial_state() const {
    return make_state(0.0, exact_jsqrt(0.0), initial_condition());
  }

  BoundaryOperators boundary_operators(double t) const {
    const MeshSample m = motion_.sample(t);
    return make_model_bcs(dx(t), mms_.epsilon, m, boundary_data(t, m.traj));
  }

  /// Spatial operator D = eps Dx^2 - Dx.
  SpMat spatial_operator(double t) const {
    const SpMat d = dx(t);
    SpMat d2 = d * d;
    SpMat op = mms_.epsilon * d2 - d;
    op.makeCompressed();
    return op;
  }

  /// Dense system matrix M = D + L B.
  Mat system_matrix(double t) const {
    const auto bc = boundary_operators(t);
    const auto lift = make_lifting(bc.delta, quadrature(t), Vec::Ones(2));
    SpMat lb = lift.L * bc.B;
    return Mat(spatial_operator(t)) + Mat(lb);
  }

  SurfaceTerms surface(double t) const { return surface_1d(motion_.sample(t)); }

  /// ALE snapshot with the exact Jacobian relative to the t = 0 mesh.
  AleOperators ale_operators(double t) const {
    AleOperators a;
    const MeshSample m = motion_.sample(t);
    const SpMat d = dx(t);
    a.Dm = build_dm(d, m.xdot);
    a.divx = divergence(t);
    a.jsqrt = exact_jsqrt(t);
    a.phat = quadrature(0.0);
    return a;
  }

 private:
  TwoBlockMotion motion_;
  ManufacturedSolution mms_;
  Forcing forcing_;
  DivergenceMode div_mode_;
  MultiblockOperator unit_;
};

/// Per-block undivided differences of order k, each block scaled by sqrt(h_b)
/// so that diag(P)^{-1} A^T A does not depend on the block spacing.
inline SpMat block_difference_matrix(const MultiblockOperator& op, const Vec& block_spacing, int k) {
  if (k < 1) throw InvalidArgument("filter difference order must be >= 1");
  std::vector<double> binom(static_cast<std::size_t>(k + 1));
  for (int j = 0; j <= k; ++j) {
    double c = 1.0;
    for (int i = 1; i <= j; ++i) c = c * (k - j + i) / i;
    binom[static_cast<std::size_t>(j)] = ((k - j) % 2 == 0 ? 1.0 : -1.0) * c;
  }
  std::vector<Triplet> t;
  int row = 0;
  for (std::size_t b = 0; b < op.blocks.size(); ++b) {
    const int nb = op.blocks[b].n;
    const double s = std::sqrt(block_spacing[static_cast<Eigen::Index>(b)]);
    for (int i = 0; i + k < nb; ++i, ++row)
      for (int j = 0; j <= k; ++j)
        t.emplace_back(row, op.offsets[b] + i + j, s * binom[static_cast<std::size_t>(j)]);
  }
  SpMat a(row, op.n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

/// Constant-preserving, energy non-increasing filter for the model's mesh.
/// The strength is sigma 4^k: at 1 the interior sawtooth mode is removed.
inline Filter make_model_filter(const AdvectionDiffusionAle& model, int k, double strength) {
  const double sigma = strength / std::pow(4.0, k);
  const auto q = model.motion().trajectory(0.0);
  const auto& l = model.motion().layout();
  Vec hb(2);
  hb << (q.xm - q.xs) / l.left_spacings, (q.xe - q.xm) / l.right_spacings;
  const SpMat a = block_difference_matrix(model.unit_operator(), hb, k);
  return Filter::dissipative(a, model.quadrature(0.0), sigma);
}

}  // namespace alesbp
