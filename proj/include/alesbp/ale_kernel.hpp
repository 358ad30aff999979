#pragma once

// Discrete ALE machinery: the skew-symmetric mesh-motion operator D_m, the
// discrete mesh-velocity divergence, the square-root Jacobian ODE, and the
// variable substitution U_hat = sqrt(J) U that maps the moving-mesh scheme to
// a fixed reference quadrature.

#include "alesbp/error.hpp"
#include "alesbp/linalg.hpp"
#include "alesbp/mesh_motion.hpp"
#include "alesbp/sbp_core.hpp"

#include <string>

namespace alesbp {

/// Surface quantities entering the boundary terms: restriction E, surface
/// quadrature P and the normal mesh velocity N^T Xdot on the surface nodes.
struct SurfaceTerms {
  Restriction E;
  Vec weights;
  Vec normal_velocity;

  /// E^T diag(P) diag(N^T Xdot) E as a volume diagonal.
  Vec volume_diagonal() const {
    return E.apply_transpose(weights.cwiseProduct(normal_velocity));
  }
};

/// 1D end points with outward normals -1 (start) and +1 (end), unit weights.
inline SurfaceTerms surface_1d(int n, double xs_dot, double xe_dot) {
  SurfaceTerms s{end_points(n), Vec::Ones(2), Vec(2)};
  s.normal_velocity << -xs_dot, xe_dot;
  return s;
}

inline SurfaceTerms surface_1d(const MeshSample& m) {
  return surface_1d(static_cast<int>(m.x.size()), m.traj.xs_dot, m.traj.xe_dot);
}

struct AleOperators {
  SpMat Dm;
  Vec divx;
  Vec jsqrt;
  Vec phat;  // reference quadrature

  /// Physical quadrature diag(J) P_hat.
  Vec P() const { return jsqrt.array().square().matrix().cwiseProduct(phat); }
};

struct SystemMatrices {
  Mat M;     // physical-variable system matrix D + L B
  Mat Mhat;  // reference-variable system matrix
};

/// D_m = 1/2 (diag(Xdot) D + D diag(Xdot)).
inline SpMat build_dm(const SpMat& D, const Vec& xdot) {
  if (D.rows() != xdot.size()) throw InvalidArgument("build_dm: dimension mismatch");
  SpMat xd = diag_sparse(xdot);
  SpMat left = xd * D;
  SpMat right = D * xd;
  SpMat dm = 0.5 * (left + right);
  dm.prune(0.0);
  return dm;
}

/// Matrix-free D_m applied to u.
inline Vec apply_dm(const SpMat& D, const Vec& xdot, const Vec& u) {
  return 0.5 * (xdot.cwiseProduct(D * u) + D * xdot.cwiseProduct(u));
}

/// div Xdot = D Xdot, the choice required for free-stream preservation.
inline Vec divergence_discrete(const SpMat& D, const Vec& xdot) {
  if (D.cols() != xdot.size()) throw InvalidArgument("divergence_discrete: dimension mismatch");
  return D * xdot;
}

/// d sqrt(J)/dt = 1/2 diag(div Xdot) sqrt(J).
inline Vec jacobian_rhs(const Vec& divx, const Vec& jsqrt) {
  if (divx.size() != jsqrt.size()) throw InvalidArgument("jacobian_rhs: dimension mismatch");
  for (Eigen::Index i = 0; i < jsqrt.size(); ++i)
    if (!(jsqrt[i] > 0.0))
      throw DegenerateMesh("non-positive sqrt(J) at node " + std::to_string(i), 0.0);
  return 0.5 * divx.cwiseProduct(jsqrt);
}

/// M_hat = diag(sqrt J) (M + D_m) diag(sqrt J)^{-1}.
inline SystemMatrices assemble(const Mat& M, const SpMat& Dm, const Vec& jsqrt) {
  for (Eigen::Index i = 0; i < jsqrt.size(); ++i)
    if (!(jsqrt[i] > 0.0)) throw DegenerateMesh("assemble: non-positive sqrt(J)", 0.0);
  Mat sum = M + Mat(Dm);
  Mat mhat = jsqrt.asDiagonal() * sum * jsqrt.cwiseInverse().asDiagonal();
  return {M, mhat};
}

/// max-norm of diag(P) D_m + D_m^T diag(P) - E^T diag(P_surf) diag(N^T Xdot) E.
inline double reynolds_identity_residual(const SpMat& Dm, const Vec& P, const SurfaceTerms& surf) {
  SpMat pd = diag_sparse(P) * Dm;
  SpMat pdt = pd.transpose();
  SpMat r = pd + pdt;
  SpMat b = diag_sparse(surf.volume_diagonal());
  SpMat diff = r - b;
  return max_abs(diff);
}

}  // namespace alesbp
