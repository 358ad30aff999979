#pragma once

// Prescribed two-block mesh motion on [x_s(t), x_e(t)] = [x_s, x_m] U [x_m, x_e].
// The left block stretches affinely between x_s and x_m; the right block
// (the boundary-layer block of fixed width) moves rigidly with x_e.

#include "alesbp/error.hpp"
#include "alesbp/linalg.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace alesbp {

struct BlockLayout {
  int left_spacings = 8;
  int right_spacings = 8;
  double layer_width = std::numbers::pi / 3.0;
  double xs0 = -std::numbers::pi;  // domain at t = 0
  double xe0 = std::numbers::pi;

  int left_nodes() const { return left_spacings + 1; }
  int right_nodes() const { return right_spacings + 1; }
  int total_nodes() const { return left_nodes() + right_nodes(); }

  double left_spacing0() const { return (xe0 - layer_width - xs0) / left_spacings; }
  double right_spacing0() const { return layer_width / right_spacings; }
  /// (right spacing) / (left spacing) at t = 0.
  double grid_ratio() const { return right_spacing0() / left_spacing0(); }
};

/// Layout with N boundary-layer spacings and the left-block spacing count
/// chosen so that (left spacing)/(right spacing) = ratio at t = 0.
inline BlockLayout layout_for_ratio(int n_layer, double ratio = 5.0) {
  BlockLayout l;
  l.right_spacings = n_layer;
  const double left_width = l.xe0 - l.layer_width - l.xs0;
  const double nl = left_width / (ratio * l.right_spacing0());
  l.left_spacings = static_cast<int>(std::lround(nl));
  if (l.left_spacings < 1 || std::abs(nl - l.left_spacings) > 1e-9)
    throw InvalidArgument("grid ratio " + std::to_string(ratio) +
                          " does not give an integer left-block spacing count");
  return l;
}

/// Boundary trajectories of the two-block domain.
struct Trajectory {
  double xs, xm, xe;
  double xs_dot, xm_dot, xe_dot;
};

struct MeshSample {
  double t = 0.0;
  Trajectory traj{};
  Vec x;      // node coordinates, left block then right block
  Vec xdot;   // node velocities
  int left_nodes = 0;

  /// Strictly increasing within each block (duplicate interface nodes coincide).
  bool non_degenerate() const {
    for (int i = 0; i + 1 < x.size(); ++i) {
      if (i + 1 == left_nodes) continue;
      if (!(x[i + 1] > x[i])) return false;
    }
    return true;
  }
};

/// Prescribed motion of the two-block mesh; a pure function of t.
class TwoBlockMotion {
 public:
  TwoBlockMotion(BlockLayout layout, bool moving) : layout_(layout), moving_(moving) {}

  const BlockLayout& layout() const { return layout_; }
  bool moving() const { return moving_; }

  Trajectory trajectory(double t) const {
    const double w = layout_.layer_width;
    if (!moving_) return {layout_.xs0, layout_.xe0 - w, layout_.xe0, 0.0, 0.0, 0.0};
    const double s = std::sin(t), c = std::cos(t);
    const double xs = layout_.xs0 + s;
    const double xe = layout_.xe0 - s;
    return {xs, xe - w, xe, c, -c, -c};
  }

  MeshSample sample(double t) const {
    MeshSample m;
    m.t = t;
    m.traj = trajectory(t);
    m.left_nodes = layout_.left_nodes();
    const int nl = layout_.left_spacings;
    const int nr = layout_.right_spacings;
    m.x.resize(layout_.total_nodes());
    m.xdot.resize(layout_.total_nodes());
    const auto& q = m.traj;
    for (int i = 0; i <= nl; ++i) {
      const double f = static_cast<double>(i) / nl;
      m.x[i] = q.xs + f * (q.xm - q.xs);
      m.xdot[i] = q.xs_dot + f * (q.xm_dot - q.xs_dot);
    }
    for (int j = 0; j <= nr; ++j) {
      const double f = static_cast<double>(j) / nr;
      m.x[nl + 1 + j] = q.xm + f * (q.xe - q.xm);
      m.xdot[nl + 1 + j] = q.xe_dot;
    }
    return m;
  }

  /// Per-node grid spacing (block spacing of the owning block).
  Vec spacing(double t) const {
    const auto q = trajectory(t);
    Vec h(layout_.total_nodes());
    h.head(layout_.left_nodes()).setConstant((q.xm - q.xs) / layout_.left_spacings);
    h.tail(layout_.right_nodes()).setConstant((q.xe - q.xm) / layout_.right_spacings);
    return h;
  }

  /// Exact nodal Jacobian relative to the t = 0 mesh.
  Vec jacobian(double t) const {
    const auto q = trajectory(t);
    const auto q0 = trajectory(0.0);
    Vec j(layout_.total_nodes());
    j.head(layout_.left_nodes()).setConstant((q.xm - q.xs) / (q0.xm - q0.xs));
    j.tail(layout_.right_nodes()).setConstant((q.xe - q.xm) / (q0.xe - q0.xm));
    return j;
  }

  /// Exact divergence of the mesh velocity, constant per block.
  Vec exact_divergence(double t) const {
    const auto q = trajectory(t);
    Vec d(layout_.total_nodes());
    d.head(layout_.left_nodes()).setConstant((q.xm_dot - q.xs_dot) / (q.xm - q.xs));
    d.tail(layout_.right_nodes()).setConstant((q.xe_dot - q.xm_dot) / (q.xe - q.xm));
    return d;
  }

  /// Smallest grid spacing over one period of the motion (sampled densely).
  double min_spacing_over_period(int samples = 512) const {
    double m = spacing(0.0).minCoeff();
    if (!moving_) return m;
    for (int k = 1; k <= samples; ++k)
      m = std::min(m, spacing(2.0 * std::numbers::pi * k / samples).minCoeff());
    return m;
  }

 private:
  BlockLayout layout_;
  bool moving_;
};

/// x_s = -pi + sin t, x_e = pi - sin t, x_m = x_e - width.
inline TwoBlockMotion oscillating_motion(const BlockLayout& layout) { return {layout, true}; }
inline MeshSample oscillating_motion(const BlockLayout& layout, double t) { return oscillating_motion(layout).sample(t); }

/// Frozen at the t = 0 layout of the moving case.
inline TwoBlockMotion stationary_motion(const BlockLayout& layout) { return {layout, false}; }

}  // namespace alesbp
