#pragma once

// Explicit Runge-Kutta marching of the semi-coupled system
//   d sqrt(J)/dt = 1/2 diag(div Xdot) sqrt(J)
//   d U_hat/dt   = RHS(sqrt(J), U, t),          U_hat = sqrt(J) U,
// with both lines advanced by the same tableau. Applying the same stage
// weights to both equations keeps U_hat = u_inf sqrt(J) for a free stream,
// whatever the step size.

#include "alesbp/ale_kernel.hpp"
#include "alesbp/error.hpp"
#include "alesbp/linalg.hpp"
#include "alesbp/symmetric_eigen.hpp"

#include <cmath>
#include <concepts>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace alesbp {

struct ButcherTableau {
  Mat a;
  Vec b;
  Vec c;

  int stages() const { return static_cast<int>(b.size()); }

  /// Throws unless the tableau is explicit and consistent.
  void validate() const {
    const int s = stages();
    if (a.rows() != s || a.cols() != s || c.size() != s)
      throw InvalidArgument("ButcherTableau: inconsistent dimensions");
    for (int k = 0; k < s; ++k)
      for (int v = k; v < s; ++v)
        if (a(k, v) != 0.0) throw InvalidArgument("ButcherTableau: not explicit");
    if (std::abs(b.sum() - 1.0) > 1e-14) throw InvalidArgument("ButcherTableau: weights do not sum to 1");
    for (int k = 0; k < s; ++k)
      if (std::abs(a.row(k).sum() - c[k]) > 1e-14)
        throw InvalidArgument("ButcherTableau: c_k != sum_v a_kv");
  }

  static ButcherTableau classical_rk4() {
    ButcherTableau t;
    t.a = Mat::Zero(4, 4);
    t.a(1, 0) = 0.5;
    t.a(2, 1) = 0.5;
    t.a(3, 2) = 1.0;
    t.b = Vec(4);
    t.b << 1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0;
    t.c = Vec(4);
    t.c << 0.0, 0.5, 0.5, 1.0;
    return t;
  }

  static ButcherTableau forward_euler() {
    return {Mat::Zero(1, 1), Vec::Ones(1), Vec::Zero(1)};
  }
};

struct SolverState {
  double t = 0.0;
  Vec jsqrt;
  Vec uhat;
  Vec u;
};

inline SolverState make_state(double t, Vec jsqrt, const Vec& u) {
  SolverState s{t, std::move(jsqrt), Vec(), u};
  s.uhat = s.jsqrt.cwiseProduct(u);
  return s;
}

enum class JacobianMode {
  Exact,    // sqrt(J) from the system's analytic values
  Coupled,  // sqrt(J) integrated with the same tableau as U_hat
};

/// A semi-discrete ALE system: mesh-velocity divergence and the right-hand
/// side RHS(sqrt(J), U, t) = sqrt(J) [D_m U + D U + L (B U - G) + F].
template <class S>
concept AleSystem = requires(const S& s, double t, const Vec& v) {
  { s.divergence(t) } -> std::convertible_to<Vec>;
  { s.rhs(t, v, v) } -> std::convertible_to<Vec>;
};

template <class S>
concept HasExactJacobian = requires(const S& s, double t) {
  { s.exact_jsqrt(t) } -> std::convertible_to<Vec>;
};

namespace detail {
inline void check_positive(const Vec& jsqrt, double t, double floor = 1e-8) {
  for (Eigen::Index i = 0; i < jsqrt.size(); ++i)
    if (!(jsqrt[i] > floor))
      throw DegenerateMesh("degenerate mesh: sqrt(J) = " + std::to_string(jsqrt[i]) + " at node " +
                               std::to_string(i) + ", t = " + std::to_string(t),
                           t);
}

template <class S>
Vec exact_jsqrt_or_throw(const S& sys, double t) {
  if constexpr (HasExactJacobian<S>)
    return sys.exact_jsqrt(t);
  else
    throw InvalidArgument("exact Jacobian mode requires a system with exact_jsqrt(t)");
}
}  // namespace detail

template <AleSystem S>
SolverState rk_step(const SolverState& st, double dt, const ButcherTableau& tab, const S& sys,
                    JacobianMode mode = JacobianMode::Coupled) {
  const int s = tab.stages();
  std::vector<Vec> kj(static_cast<std::size_t>(s));  // 1/2 divX * sqrt(J) stage slopes
  std::vector<Vec> ku(static_cast<std::size_t>(s));  // RHS stage slopes
  for (int k = 0; k < s; ++k) {
    const double tk = st.t + tab.c[k] * dt;
    Vec js, uh;
    if (mode == JacobianMode::Exact) {
      js = detail::exact_jsqrt_or_throw(sys, tk);
    } else {
      js = st.jsqrt;
      for (int v = 0; v < k; ++v)
        if (tab.a(k, v) != 0.0) js += dt * tab.a(k, v) * kj[static_cast<std::size_t>(v)];
    }
    uh = st.uhat;
    for (int v = 0; v < k; ++v)
      if (tab.a(k, v) != 0.0) uh += dt * tab.a(k, v) * ku[static_cast<std::size_t>(v)];
    detail::check_positive(js, tk);
    const Vec u = uh.cwiseQuotient(js);
    if (mode == JacobianMode::Coupled) kj[static_cast<std::size_t>(k)] = jacobian_rhs(sys.divergence(tk), js);
    ku[static_cast<std::size_t>(k)] = sys.rhs(tk, js, u);
  }

  SolverState out;
  out.t = st.t + dt;
  if (mode == JacobianMode::Exact) {
    out.jsqrt = detail::exact_jsqrt_or_throw(sys, out.t);
  } else {
    out.jsqrt = st.jsqrt;
    for (int k = 0; k < s; ++k) out.jsqrt += dt * tab.b[k] * kj[static_cast<std::size_t>(k)];
  }
  out.uhat = st.uhat;
  for (int k = 0; k < s; ++k) out.uhat += dt * tab.b[k] * ku[static_cast<std::size_t>(k)];
  detail::check_positive(out.jsqrt, out.t);
  out.u = out.uhat.cwiseQuotient(out.jsqrt);
  return out;
}

/// Post-step filter U <- F U with F 1 = 1,
/// diag(P)(F - I) + (F - I)^T diag(P) <= 0 and F^T diag(P) F <= diag(P).
class Filter {
 public:
  static Filter identity(int n) {
    Filter f;
    f.F_ = SpMat(n, n);
    f.F_.setIdentity();
    f.identity_ = true;
    return f;
  }

  /// F = I - sigma diag(P)^{-1} A^T A; A must annihilate constants.
  static Filter dissipative(const SpMat& A, const Vec& P, double sigma) {
    if (sigma < 0.0) throw InvalidArgument("Filter: negative strength");
    SpMat at = A.transpose();
    SpMat ata = at * A;
    SpMat id(P.size(), P.size());
    id.setIdentity();
    SpMat scaled = diag_sparse(P.cwiseInverse()) * ata;
    SpMat F = id - sigma * scaled;
    return from_matrix(F, P);
  }

  /// Validates both filter conditions against the quadrature P.
  static Filter from_matrix(const SpMat& F, const Vec& P, double tol = 1e-12) {
    const Eigen::Index n = P.size();
    if (F.rows() != n || F.cols() != n) throw InvalidArgument("Filter: dimension mismatch");
    const Vec f1 = F * Vec::Ones(n);
    if (max_abs(Vec(f1 - Vec::Ones(n))) > tol)
      throw InvalidArgument("Filter: F 1 != 1 (not constant preserving)");
    Mat fm = Mat(F) - Mat::Identity(n, n);
    Mat e = P.asDiagonal() * fm;
    e += fm.transpose() * P.asDiagonal();
    const double scale = std::max(max_abs(e), 1e-300);
    const Vec ev = symmetric_eigenvalues(0.5 * (e + e.transpose()));
    if (ev.maxCoeff() > tol * scale) throw InvalidArgument("Filter: energy increasing");
    const Mat fd(F);
    Mat c = fd.transpose() * P.asDiagonal() * fd;
    c.diagonal() -= P;
    const Vec evc = symmetric_eigenvalues(0.5 * (c + c.transpose()));
    if (evc.maxCoeff() > tol * P.maxCoeff()) throw InvalidArgument("Filter: not norm non-expanding");
    Filter f;
    f.F_ = F;
    return f;
  }

  bool is_identity() const { return identity_; }
  const SpMat& matrix() const { return F_; }

  Vec apply(const Vec& u) const { return identity_ ? u : Vec(F_ * u); }

  SolverState apply(const SolverState& st) const {
    if (identity_) return st;
    SolverState out = st;
    out.u = F_ * st.u;
    out.uhat = st.jsqrt.cwiseProduct(out.u);
    return out;
  }

 private:
  SpMat F_;
  bool identity_ = false;
};

struct RunOptions {
  double dt = 0.0;
  double t_end = 0.0;
  JacobianMode mode = JacobianMode::Coupled;
  std::optional<Filter> filter;
  /// Called with the initial state and after every completed step.
  std::function<void(const SolverState&)> observer;
};

/// Marches to t_end; the final step is shortened to land on t_end exactly.
template <AleSystem S>
SolverState run(SolverState state, const S& sys, const ButcherTableau& tab, const RunOptions& opt) {
  tab.validate();
  if (!(opt.dt > 0.0)) throw InvalidArgument("run: time step must be positive");
  if (opt.observer) opt.observer(state);
  const double span = opt.t_end - state.t;
  if (span <= 0.0) return state;
  const auto steps = static_cast<long>(std::ceil(span / opt.dt - 1e-9));
  const double t0 = state.t;
  for (long n = 0; n < steps; ++n) {
    const double t_next = n + 1 == steps ? opt.t_end : t0 + static_cast<double>(n + 1) * opt.dt;
    state = rk_step(state, t_next - state.t, tab, sys, opt.mode);
    state.t = t_next;
    if (opt.filter) state = opt.filter->apply(state);
    if (!state.u.allFinite())
      throw NumericalBreakdown("non-finite solution at t = " + std::to_string(state.t), state.t);
    if (opt.observer) opt.observer(state);
  }
  return state;
}

}  // namespace alesbp
