#pragma once

// Energy-matrix audit. The physical-space energy condition
//   S  = diag(P) M + M^T diag(P) + E^T diag(P_surf) diag(N^T Xdot) E - alpha diag(P) <= 0
// and the reference-domain semi-boundedness condition
//   S^ = diag(P^) M^ + M^^T diag(P^) - alpha diag(P^) <= 0
// are related by the congruence S^ = diag(sqrt J)^{-1} S diag(sqrt J)^{-1},
// so they have the same inertia.

#include "alesbp/ale_kernel.hpp"
#include "alesbp/linalg.hpp"
#include "alesbp/symmetric_eigen.hpp"

namespace alesbp {

struct Inertia {
  int negative = 0;
  int zero = 0;
  int positive = 0;
  friend bool operator==(const Inertia&, const Inertia&) = default;
};

/// Eigenvalues within tol * max|lambda| of zero count as zero.
inline Inertia inertia(const Vec& eigenvalues, double tol = 1e-10) {
  Inertia in;
  const double scale = max_abs(eigenvalues);
  for (double l : eigenvalues) {
    if (l > tol * scale)
      ++in.positive;
    else if (l < -tol * scale)
      ++in.negative;
    else
      ++in.zero;
  }
  return in;
}

struct AuditReport {
  double t = 0.0;
  double alpha = 0.0;
  double lambda_max_energy = 0.0;
  double lambda_max_ref = 0.0;
  double norm_energy = 0.0;  // max |lambda(S)|
  double norm_ref = 0.0;
  Inertia inertia_energy;
  Inertia inertia_ref;
  bool pass = false;  // lambda_max(S) <= tol * ||S||

  bool inertia_match() const { return inertia_energy == inertia_ref; }
};

inline Mat energy_matrix(const Mat& M, const Vec& P, const SurfaceTerms& surf, double alpha) {
  Mat s = P.asDiagonal() * M;
  s += M.transpose() * P.asDiagonal();
  s.diagonal() += surf.volume_diagonal() - alpha * P;
  return s;
}

inline Mat reference_matrix(const Mat& Mhat, const Vec& Phat, double alpha) {
  Mat s = Phat.asDiagonal() * Mhat;
  s += Mhat.transpose() * Phat.asDiagonal();
  s.diagonal() -= alpha * Phat;
  return s;
}

inline AuditReport audit(const SystemMatrices& sys, const AleOperators& ale, const SurfaceTerms& surf,
                         double alpha = 0.0, double t = 0.0, double tol = 1e-10) {
  const Mat s = energy_matrix(sys.M, ale.P(), surf, alpha);
  const Mat sh = reference_matrix(sys.Mhat, ale.phat, alpha);
  // Round-off can break exact symmetry at the 1e-16 level; the solver only
  // sees the symmetric part.
  const Vec ev = symmetric_eigenvalues(0.5 * (s + s.transpose()));
  const Vec evh = symmetric_eigenvalues(0.5 * (sh + sh.transpose()));
  AuditReport r;
  r.t = t;
  r.alpha = alpha;
  r.lambda_max_energy = ev.maxCoeff();
  r.lambda_max_ref = evh.maxCoeff();
  r.norm_energy = max_abs(ev);
  r.norm_ref = max_abs(evh);
  r.inertia_energy = inertia(ev, tol);
  r.inertia_ref = inertia(evh, tol);
  r.pass = r.lambda_max_energy <= tol * r.norm_energy;
  return r;
}

inline bool inertia_equivalence(const SystemMatrices& sys, const AleOperators& ale,
                                const SurfaceTerms& surf, double alpha = 0.0, double tol = 1e-10) {
  return audit(sys, ale, surf, alpha, 0.0, tol).inertia_match();
}

}  // namespace alesbp
