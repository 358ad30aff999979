#pragma once

// Boundary operators B, lifting matrices delta and the discrete lifting
// operator L = diag(P)^{-1} delta^T diag(P_surf), which carries surface
// penalty data into the volume so that (Phi, L Psi)_P = (delta Phi, Psi)_Psurf.

#include "alesbp/ale_kernel.hpp"
#include "alesbp/error.hpp"
#include "alesbp/linalg.hpp"

#include <string>

namespace alesbp {

struct BoundaryOperators {
  SpMat B;      // n_S x n_V
  SpMat delta;  // n_S x n_V
  Vec g;        // boundary data, n_S
};

struct LiftingOperator {
  SpMat L;  // n_V x n_S
};

namespace detail {
inline void append_row(std::vector<Triplet>& t, int row, const SpMat& m, int src_row, double scale) {
  for (SpMat::InnerIterator it(m, src_row); it; ++it) t.emplace_back(row, it.col(), scale * it.value());
}
}  // namespace detail

/// Characteristic inflow at x_s and Dirichlet at x_e for u_t = eps u_xx - u_x:
///   B     = ( eps E_s Dx - (1 - xs_dot) E_s ;  E_e )
///   delta = ( E_s ;  -eps E_e Dx + 1/2 (1 - xe_dot) E_e ).
/// Dx is the physical-coordinate first-derivative operator at the same time.
inline BoundaryOperators make_model_bcs(const SpMat& Dx, double eps, double xs_dot, double xe_dot,
                                        Vec g = Vec::Zero(2)) {
  if (xs_dot > 1.0)
    throw InvalidArgument("make_model_bcs: xs_dot = " + std::to_string(xs_dot) +
                          " > 1 turns the left boundary into an outflow boundary");
  const int n = static_cast<int>(Dx.rows());
  const int e = n - 1;
  std::vector<Triplet> bt, dt;
  detail::append_row(bt, 0, Dx, 0, eps);
  bt.emplace_back(0, 0, -(1.0 - xs_dot));
  bt.emplace_back(1, e, 1.0);
  dt.emplace_back(0, 0, 1.0);
  detail::append_row(dt, 1, Dx, e, -eps);
  dt.emplace_back(1, e, 0.5 * (1.0 - xe_dot));

  BoundaryOperators ops;
  ops.B.resize(2, n);
  ops.B.setFromTriplets(bt.begin(), bt.end());
  ops.delta.resize(2, n);
  ops.delta.setFromTriplets(dt.begin(), dt.end());
  ops.g = std::move(g);
  return ops;
}

inline BoundaryOperators make_model_bcs(const SpMat& Dx, double eps, const MeshSample& m,
                                        Vec g = Vec::Zero(2)) {
  return make_model_bcs(Dx, eps, m.traj.xs_dot, m.traj.xe_dot, std::move(g));
}

inline LiftingOperator make_lifting(const SpMat& delta, const Vec& P, const Vec& surface_weights) {
  SpMat dt = delta.transpose();
  SpMat l = diag_sparse(P.cwiseInverse()) * dt * diag_sparse(surface_weights);
  return {l};
}

inline Vec lifting_apply(const LiftingOperator& lift, const Vec& psi) { return lift.L * psi; }

/// E(D, B, Phi) = (Phi, D Phi)_P + (delta Phi, B Phi)_Psurf + 1/2 (Phi_s, N^T Xdot Phi_s)_Psurf.
template <class DMatrix>
double energy_functional(const DMatrix& D, const BoundaryOperators& bc, const Vec& P,
                         const SurfaceTerms& surf, const Vec& phi) {
  const Vec dphi = D * phi;
  const Vec dlt = bc.delta * phi;
  const Vec bphi = bc.B * phi;
  const Vec ps = surf.E.apply(phi);
  return inner(phi, dphi, P) + inner(dlt, bphi, surf.weights) +
         0.5 * inner(ps, surf.normal_velocity.cwiseProduct(ps), surf.weights);
}

/// Closed form of the energy functional for the advection-diffusion operators
/// built by make_model_bcs: -eps ||Dx Phi||_P^2 - 1/2 (1 - xs_dot) Phi_s^2.
inline double model_bc_energy_closed_form(const SpMat& Dx, const Vec& P, double eps, double xs_dot,
                                       const Vec& phi) {
  const Vec dphi = Dx * phi;
  return -eps * inner(dphi, dphi, P) - 0.5 * (1.0 - xs_dot) * phi[0] * phi[0];
}

}  // namespace alesbp
