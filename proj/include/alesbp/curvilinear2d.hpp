#pragma once

// Two-dimensional tensor-product SBP operators on the unit square, discrete
// metric terms of a moving mapping x(xi, t), and split-form physical
// derivative operators
//   Dx1 = 1/2 J^{-1} [D1 Y1 + Y1 D1 - D2 Z1 - Z1 D2],  Y1 = diag(D2 X2), Z1 = diag(D1 X2)
//   Dx2 = 1/2 J^{-1} [D2 Y2 + Y2 D2 - D1 Z2 - Z2 D1],  Y2 = diag(D1 X1), Z2 = diag(D2 X1)
// with J = (D1 X1)(D2 X2) - (D2 X1)(D1 X2). Because D1 and D2 commute,
// Dx1 1 = Dx2 1 = 0.
//
// Node (i, j) with i along xi1 and j along xi2 is stored at k = i n + j, so
// D1 = D (x) I and D2 = I (x) D.

#include "alesbp/ale_kernel.hpp"
#include "alesbp/error.hpp"
#include "alesbp/linalg.hpp"
#include "alesbp/sbp_core.hpp"
#include "alesbp/time_integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace alesbp {

struct TensorOps2D {
  SbpOperator1D base;  // 1D operator on [0, 1]
  int n = 0;           // nodes per direction
  SpMat D1;
  SpMat D2;
  Vec Phat;  // P (x) P
  Vec xi1;   // reference coordinates of every node
  Vec xi2;

  int size() const { return n * n; }
  int index(int i, int j) const { return i * n + j; }
};

namespace detail {
inline SpMat kron(const SpMat& a, const SpMat& b) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (int ra = 0; ra < a.outerSize(); ++ra)
    for (SpMat::InnerIterator ia(a, ra); ia; ++ia)
      for (int rb = 0; rb < b.outerSize(); ++rb)
        for (SpMat::InnerIterator ib(b, rb); ib; ++ib)
          t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                         ia.value() * ib.value());
  SpMat k(a.rows() * b.rows(), a.cols() * b.cols());
  k.setFromTriplets(t.begin(), t.end());
  return k;
}
}  // namespace detail

inline TensorOps2D make_tensor_ops(SbpOrder order, int n) {
  TensorOps2D ops;
  ops.base = build_operator(order, n, 1.0 / (n - 1), 0.0);
  ops.n = n;
  SpMat id(n, n);
  id.setIdentity();
  ops.D1 = detail::kron(ops.base.D, id);
  ops.D2 = detail::kron(id, ops.base.D);
  ops.Phat.resize(n * n);
  ops.xi1.resize(n * n);
  ops.xi2.resize(n * n);
  const Vec x = ops.base.nodes();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int k = ops.index(i, j);
      ops.Phat[k] = ops.base.P[i] * ops.base.P[j];
      ops.xi1[k] = x[i];
      ops.xi2[k] = x[j];
    }
  return ops;
}

/// Diagonal of (-e0 e0^T + en en^T) (x) P (dir 0) or P (x) (-e0 e0^T + en en^T) (dir 1).
inline Vec reference_boundary(const TensorOps2D& ops, int dir) {
  const int n = ops.n;
  Vec b = Vec::Zero(ops.size());
  for (int m = 0; m < n; ++m) {
    const double w = ops.base.P[m];
    if (dir == 0) {
      b[ops.index(0, m)] -= w;
      b[ops.index(n - 1, m)] += w;
    } else {
      b[ops.index(m, 0)] -= w;
      b[ops.index(m, n - 1)] += w;
    }
  }
  return b;
}

using Point2 = std::array<double, 2>;

/// Moving mapping from the unit square; xdot must be the time derivative of x.
struct Mapping2D {
  std::string name;
  std::function<Point2(double xi1, double xi2, double t)> x;
  std::function<Point2(double xi1, double xi2, double t)> xdot;
};

struct MeshFields2D {
  Vec x1, x2, xd1, xd2;
};

inline MeshFields2D sample_mapping(const TensorOps2D& ops, const Mapping2D& map, double t) {
  MeshFields2D f{Vec(ops.size()), Vec(ops.size()), Vec(ops.size()), Vec(ops.size())};
  for (int k = 0; k < ops.size(); ++k) {
    const auto p = map.x(ops.xi1[k], ops.xi2[k], t);
    const auto v = map.xdot(ops.xi1[k], ops.xi2[k], t);
    f.x1[k] = p[0];
    f.x2[k] = p[1];
    f.xd1[k] = v[0];
    f.xd2[k] = v[1];
  }
  return f;
}

namespace mappings {

inline Mapping2D identity() {
  return {"identity", [](double a, double b, double) { return Point2{a, b}; },
          [](double, double, double) { return Point2{0.0, 0.0}; }};
}

/// x = (1 + t) xi.
inline Mapping2D dilation() {
  return {"dilation", [](double a, double b, double t) { return Point2{(1 + t) * a, (1 + t) * b}; },
          [](double a, double b, double) { return Point2{a, b}; }};
}

/// x = xi + (t, 0).
inline Mapping2D translation() {
  return {"translation", [](double a, double b, double t) { return Point2{a + t, b}; },
          [](double, double, double) { return Point2{1.0, 0.0}; }};
}

/// Static x = A xi.
inline Mapping2D affine(double a11, double a12, double a21, double a22) {
  return {"affine",
          [=](double a, double b, double) { return Point2{a11 * a + a12 * b, a21 * a + a22 * b}; },
          [](double, double, double) { return Point2{0.0, 0.0}; }};
}

/// Static rotation by theta combined with scaling s.
inline Mapping2D rotate_scale(double theta, double s) {
  const double c = s * std::cos(theta), n = s * std::sin(theta);
  Mapping2D m = affine(c, -n, n, c);
  m.name = "rotate_scale";
  return m;
}

/// x1 = xi1 + 0.1 sin(pi xi2) sin t, x2 = xi2. A shear in xi2 only.
inline Mapping2D wavy() {
  constexpr double pi = std::numbers::pi;
  return {"wavy",
          [](double a, double b, double t) { return Point2{a + 0.1 * std::sin(pi * b) * std::sin(t), b}; },
          [](double, double b, double t) { return Point2{0.1 * std::sin(pi * b) * std::cos(t), 0.0}; }};
}

/// Curved mapping with both coordinates moving and metric terms varying in
/// both directions.
inline Mapping2D curved() {
  constexpr double pi = std::numbers::pi;
  return {"curved",
          [](double a, double b, double t) {
            const double s = std::sin(t);
            return Point2{a + 0.08 * std::sin(pi * a) * std::sin(pi * b) * s + 0.05 * b * b,
                          b + 0.06 * std::sin(2 * pi * a) * std::sin(pi * b) * s + 0.04 * a * b};
          },
          [](double a, double b, double t) {
            const double c = std::cos(t);
            return Point2{0.08 * std::sin(pi * a) * std::sin(pi * b) * c,
                          0.06 * std::sin(2 * pi * a) * std::sin(pi * b) * c};
          }};
}

inline std::vector<Mapping2D> registry() {
  return {identity(), dilation(), translation(), affine(2.0, 0.0, 0.0, 3.0), wavy(), curved()};
}

}  // namespace mappings

/// Discrete metric derivatives and Jacobian determinant.
struct Metrics2D {
  Vec x1_1, x1_2, x2_1, x2_2;  // D_j X_i stored as xi_j
  Vec J;
};

inline Metrics2D metrics(const TensorOps2D& ops, const MeshFields2D& f) {
  Metrics2D m;
  m.x1_1 = ops.D1 * f.x1;
  m.x1_2 = ops.D2 * f.x1;
  m.x2_1 = ops.D1 * f.x2;
  m.x2_2 = ops.D2 * f.x2;
  m.J = m.x1_1.cwiseProduct(m.x2_2) - m.x1_2.cwiseProduct(m.x2_1);
  return m;
}

namespace detail {
inline void check_jacobian(const Vec& J, double t) {
  for (Eigen::Index k = 0; k < J.size(); ++k)
    if (!(J[k] > 0.0))
      throw DegenerateMesh("degenerate mapping: J = " + std::to_string(J[k]) + " at node " +
                               std::to_string(k) + ", t = " + std::to_string(t),
                           t);
}
}  // namespace detail

inline Vec jacobian_discrete(const TensorOps2D& ops, const Mapping2D& map, double t) {
  Vec J = metrics(ops, sample_mapping(ops, map, t)).J;
  detail::check_jacobian(J, t);
  return J;
}

/// dJ/dt of the product formula:
/// (D1 Xd1)(D2 X2) + (D1 X1)(D2 Xd2) - (D2 Xd1)(D1 X2) - (D2 X1)(D1 Xd2).
inline Vec jacobian_rate(const TensorOps2D& ops, const MeshFields2D& f, const Metrics2D& m) {
  const Vec v11 = ops.D1 * f.xd1, v12 = ops.D2 * f.xd1;
  const Vec v21 = ops.D1 * f.xd2, v22 = ops.D2 * f.xd2;
  return v11.cwiseProduct(m.x2_2) + m.x1_1.cwiseProduct(v22) - v12.cwiseProduct(m.x2_1) -
         m.x1_2.cwiseProduct(v21);
}

/// Divergence of the mesh velocity from the Jacobian identity, J^{-1} dJ/dt.
inline Vec divergence_from_jacobian(const TensorOps2D& ops, const Mapping2D& map, double t) {
  const auto f = sample_mapping(ops, map, t);
  const auto m = metrics(ops, f);
  detail::check_jacobian(m.J, t);
  return jacobian_rate(ops, f, m).cwiseQuotient(m.J);
}

/// Physical derivative operators at one time level, applied matrix-free.
class PhysicalOps2D {
 public:
  PhysicalOps2D(const TensorOps2D& ops, const MeshFields2D& f, double t = 0.0)
      : ops_(&ops), m_(metrics(ops, f)) {
    detail::check_jacobian(m_.J, t);
    half_inv_j_ = 0.5 * m_.J.cwiseInverse();
  }

  const Metrics2D& metrics2d() const { return m_; }
  const Vec& J() const { return m_.J; }

  Vec dx1(const Vec& u) const { return split(u, m_.x2_2, m_.x2_1, ops_->D1, ops_->D2); }
  Vec dx2(const Vec& u) const { return split(u, m_.x1_1, m_.x1_2, ops_->D2, ops_->D1); }

  SpMat dx1_matrix() const { return split_matrix(m_.x2_2, m_.x2_1, ops_->D1, ops_->D2); }
  SpMat dx2_matrix() const { return split_matrix(m_.x1_1, m_.x1_2, ops_->D2, ops_->D1); }

  /// Boundary diagonals b1, b2 with diag(J P^) Dxi + Dxi^T diag(J P^) = diag(bi).
  Vec b1() const {
    return reference_boundary(*ops_, 0).cwiseProduct(m_.x2_2) - reference_boundary(*ops_, 1).cwiseProduct(m_.x2_1);
  }
  Vec b2() const {
    return reference_boundary(*ops_, 1).cwiseProduct(m_.x1_1) - reference_boundary(*ops_, 0).cwiseProduct(m_.x1_2);
  }

  /// Physical quadrature diag(J) P^.
  Vec P() const { return m_.J.cwiseProduct(ops_->Phat); }

 private:
  // 1/2 J^{-1} [Da Y + Y Da - Db Z - Z Db]
  Vec split(const Vec& u, const Vec& y, const Vec& z, const SpMat& da, const SpMat& db) const {
    Vec r = da * y.cwiseProduct(u) + y.cwiseProduct(da * u);
    r -= db * z.cwiseProduct(u) + z.cwiseProduct(db * u);
    return half_inv_j_.cwiseProduct(r);
  }

  SpMat split_matrix(const Vec& y, const Vec& z, const SpMat& da, const SpMat& db) const {
    const SpMat Y = diag_sparse(y), Z = diag_sparse(z);
    SpMat t1 = da * Y, t2 = Y * da, t3 = db * Z, t4 = Z * db;
    SpMat sum = t1 + t2;
    SpMat sub = t3 + t4;
    SpMat diff = sum - sub;
    SpMat out = diag_sparse(half_inv_j_) * diff;
    out.makeCompressed();
    return out;
  }

  const TensorOps2D* ops_;
  Metrics2D m_;
  Vec half_inv_j_;
};

inline std::array<SpMat, 2> physical_ops(const TensorOps2D& ops, const Mapping2D& map, double t) {
  const PhysicalOps2D p(ops, sample_mapping(ops, map, t), t);
  return {p.dx1_matrix(), p.dx2_matrix()};
}

/// Divergence built from the physical operators, Dx1 Xd1 + Dx2 Xd2.
inline Vec divergence_physical(const TensorOps2D& ops, const Mapping2D& map, double t) {
  const auto f = sample_mapping(ops, map, t);
  const PhysicalOps2D p(ops, f, t);
  return p.dx1(f.xd1) + p.dx2(f.xd2);
}

/// Constant-coefficient advection u_t + a . grad u = 0 on a moving mapping,
/// in the semi-coupled sqrt(J) form used by rk_step. Inflow is imposed by
/// SAT_i = -max(0, c_i) (U_i - g) / (J P^)_i with c = Xdot.n - a.n the
/// node-wise boundary flux coefficient, which makes the boundary
/// contribution to the energy rate -sum |c_i| U_i^2.
class Advection2DAle {
 public:
  enum class DivergenceSource { PhysicalOperators, JacobianIdentity };

  Advection2DAle(TensorOps2D ops, Mapping2D map, Point2 a, double u_inf,
                 DivergenceSource src = DivergenceSource::PhysicalOperators)
      : ops_(std::move(ops)), map_(std::move(map)), a_(a), u_inf_(u_inf), src_(src) {}

  const TensorOps2D& ops() const { return ops_; }
  int size() const { return ops_.size(); }

  Vec divergence(double t) const {
    return src_ == DivergenceSource::PhysicalOperators ? divergence_physical(ops_, map_, t)
                                                       : divergence_from_jacobian(ops_, map_, t);
  }

  Vec exact_jsqrt(double t) const { return jacobian_discrete(ops_, map_, t).cwiseSqrt(); }

  Vec rhs(double t, const Vec& jsqrt, const Vec& u) const {
    const auto f = sample_mapping(ops_, map_, t);
    const PhysicalOps2D p(ops_, f, t);
    const Vec ux1 = p.dx1(u), ux2 = p.dx2(u);
    Vec r = -a_[0] * ux1 - a_[1] * ux2;
    r += 0.5 * (f.xd1.cwiseProduct(ux1) + p.dx1(f.xd1.cwiseProduct(u)));
    r += 0.5 * (f.xd2.cwiseProduct(ux2) + p.dx2(f.xd2.cwiseProduct(u)));
    const Vec b1 = p.b1(), b2 = p.b2();
    const Vec c = f.xd1.cwiseProduct(b1) + f.xd2.cwiseProduct(b2) - a_[0] * b1 - a_[1] * b2;
    const Vec P = p.P();
    for (int k = 0; k < size(); ++k)
      if (c[k] > 0.0) r[k] -= c[k] * (u[k] - u_inf_) / P[k];
    return jsqrt.cwiseProduct(r);
  }

  SolverState initial_state() const {
    return make_state(0.0, exact_jsqrt(0.0), Vec::Constant(size(), u_inf_));
  }

  /// Advective time step cfl * h / (|a| + max |Xdot|) over one period.
  double stable_dt(double cfl = 0.2, int samples = 64) const {
    double vmax = 0.0;
    for (int k = 0; k < samples; ++k) {
      const auto f = sample_mapping(ops_, map_, 2.0 * std::numbers::pi * k / samples);
      vmax = std::max(vmax, (f.xd1.array().square() + f.xd2.array().square()).sqrt().maxCoeff());
    }
    return cfl * ops_.base.h / (std::hypot(a_[0], a_[1]) + vmax);
  }

 private:
  TensorOps2D ops_;
  Mapping2D map_;
  Point2 a_;
  double u_inf_;
  DivergenceSource src_;
};

/// Max over all steps of ||U - u_inf 1||_inf for an RK4 march over [0, t_end].
inline double freestream_deviation_2d(const Advection2DAle& sys, double u_inf, double t_end, JacobianMode mode,
                                      double cfl = 0.2) {
  RunOptions opt;
  opt.dt = sys.stable_dt(cfl);
  opt.t_end = t_end;
  opt.mode = mode;
  double dev = 0.0;
  opt.observer = [&](const SolverState& s) { dev = std::max(dev, (s.u.array() - u_inf).abs().maxCoeff()); };
  run(sys.initial_state(), sys, ButcherTableau::classical_rk4(), opt);
  return dev;
}

/// Which divergence a Jacobian definition is consistent with.
struct FspModeReport {
  std::string mapping;
  std::string mode;      // "gcl-ode" or "product-formula"
  std::string jacobian;  // the Jacobian definition the mode needs
  double discrepancy = 0.0;  // max over sampled t of |div_identity - div_physical|
  double fsp_deviation = 0.0;
};

/// Compares the Jacobian-identity divergence with Dx1 Xd1 + Dx2 Xd2 and runs
/// the 2D free stream in both modes: sqrt(J) from the discrete GCL ODE driven
/// by the physical-operator divergence, and sqrt(J) from the product formula.
inline std::vector<FspModeReport> fsp_mode_check(const TensorOps2D& ops, const Mapping2D& map,
                                                 int samples = 16, bool run_fsp = true) {
  double disc = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double t = 2.0 * std::numbers::pi * k / samples;
    disc = std::max(disc, max_abs(Vec(divergence_from_jacobian(ops, map, t) - divergence_physical(ops, map, t))));
  }
  const Point2 a{1.0, 0.5};
  const double u_inf = 1.0;
  const double period = 2.0 * std::numbers::pi;
  FspModeReport ode{map.name, "gcl-ode", "J integrated from d sqrt(J)/dt = 1/2 (Dx1 Xd1 + Dx2 Xd2) sqrt(J)", disc, 0.0};
  FspModeReport prod{map.name, "product-formula", "J = (D1 X1)(D2 X2) - (D2 X1)(D1 X2)", disc, 0.0};
  if (run_fsp) {
    ode.fsp_deviation = freestream_deviation_2d(Advection2DAle(ops, map, a, u_inf), u_inf, period, JacobianMode::Coupled);
    prod.fsp_deviation = freestream_deviation_2d(Advection2DAle(ops, map, a, u_inf), u_inf, period, JacobianMode::Exact);
  }
  return {ode, prod};
}

}  // namespace alesbp
