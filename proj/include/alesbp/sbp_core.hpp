#pragma once

// Diagonal-norm summation-by-parts first-derivative operators in 1D, and
// encapsulated multiblock operators built by SAT interface coupling.
//
// Every operator here satisfies D = P^{-1} Q with
//   Q + Q^T = -e_s e_s^T + e_e e_e^T,
// where e_s, e_e pick the first and last node of the (global) node set.

#include "alesbp/error.hpp"
#include "alesbp/linalg.hpp"

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace alesbp {

/// Accuracy pair (interior order, boundary closure order).
enum class SbpOrder { Order21, Order42 };

struct OrderPair {
  int interior;
  int boundary;
};

constexpr OrderPair order_pair(SbpOrder o) {
  return o == SbpOrder::Order21 ? OrderPair{2, 1} : OrderPair{4, 2};
}

/// Number of rows at each end that use closure stencils.
constexpr int closure_width(SbpOrder o) { return o == SbpOrder::Order21 ? 1 : 4; }

constexpr int min_nodes(SbpOrder o) { return 2 * closure_width(o); }

inline std::string to_string(SbpOrder o) {
  return o == SbpOrder::Order21 ? "2,1" : "4,2";
}

inline SbpOrder parse_order(std::string_view s) {
  if (s == "2,1" || s == "21" || s == "2") return SbpOrder::Order21;
  if (s == "4,2" || s == "42" || s == "4") return SbpOrder::Order42;
  throw InvalidArgument("unknown SBP order '" + std::string(s) + "' (expected 2,1 or 4,2)");
}

struct SbpOperator1D {
  SbpOrder order = SbpOrder::Order21;
  int n = 0;
  double h = 0.0;
  double x0 = 0.0;  // coordinate of node 0
  Vec P;            // diagonal quadrature weights
  SpMat Q;
  SpMat D;

  int order_interior() const { return order_pair(order).interior; }
  int order_boundary() const { return order_pair(order).boundary; }
  int start() const { return 0; }
  int end() const { return n - 1; }
  double x_end() const { return x0 + (n - 1) * h; }

  Vec nodes() const {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = x0 + i * h;
    return x;
  }
};

namespace detail {

struct ClosureTable {
  int width;                            // closure rows per boundary
  int stencil_half;                     // interior stencil half width
  std::vector<double> weights;          // P/h for the closure rows
  std::vector<std::vector<double>> rows;  // h*D for the closure rows, columns from 0
  std::vector<double> interior;         // h*D interior stencil, offsets -half..half
};

inline const ClosureTable& closure_table(SbpOrder o) {
  static const ClosureTable second{
      1, 1, {0.5}, {{-1.0, 1.0}}, {-0.5, 0.0, 0.5}};
  // Classical diagonal-norm (4,2) closure.
  static const ClosureTable fourth{
      4,
      2,
      {17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0},
      {{-24.0 / 17.0, 59.0 / 34.0, -4.0 / 17.0, -3.0 / 34.0, 0.0, 0.0},
       {-1.0 / 2.0, 0.0, 1.0 / 2.0, 0.0, 0.0, 0.0},
       {4.0 / 43.0, -59.0 / 86.0, 0.0, 59.0 / 86.0, -4.0 / 43.0, 0.0},
       {3.0 / 98.0, 0.0, -59.0 / 98.0, 0.0, 32.0 / 49.0, -4.0 / 49.0}},
      {1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0}};
  return o == SbpOrder::Order21 ? second : fourth;
}

}  // namespace detail

/// Builds the diagonal-norm SBP operator of the given order on n uniformly
/// spaced nodes starting at x0.
inline SbpOperator1D build_operator(SbpOrder order, int n, double h, double x0 = 0.0) {
  if (n < min_nodes(order))
    throw InvalidArgument("SBP(" + to_string(order) + ") needs at least " +
                          std::to_string(min_nodes(order)) + " nodes, got " + std::to_string(n));
  if (!(h > 0.0)) throw InvalidArgument("SBP grid spacing must be positive");

  const auto& tab = detail::closure_table(order);
  Vec punit = Vec::Ones(n);
  for (int i = 0; i < tab.width; ++i) {
    punit[i] = tab.weights[static_cast<std::size_t>(i)];
    punit[n - 1 - i] = tab.weights[static_cast<std::size_t>(i)];
  }

  // Unit-spacing derivative stencil, row by row.
  std::vector<Triplet> dt;
  dt.reserve(static_cast<std::size_t>(n) * 6);
  for (int i = 0; i < n; ++i) {
    if (i < tab.width) {
      const auto& row = tab.rows[static_cast<std::size_t>(i)];
      for (std::size_t j = 0; j < row.size(); ++j)
        if (row[j] != 0.0) dt.emplace_back(i, static_cast<int>(j), row[j]);
    } else if (i >= n - tab.width) {
      // Reflected closure: D[n-1-i][n-1-j] = -D[i][j].
      const auto& row = tab.rows[static_cast<std::size_t>(n - 1 - i)];
      for (std::size_t j = 0; j < row.size(); ++j)
        if (row[j] != 0.0) dt.emplace_back(i, n - 1 - static_cast<int>(j), -row[j]);
    } else {
      for (int k = -tab.stencil_half; k <= tab.stencil_half; ++k) {
        double c = tab.interior[static_cast<std::size_t>(k + tab.stencil_half)];
        if (c != 0.0) dt.emplace_back(i, i + k, c);
      }
    }
  }

  SbpOperator1D op;
  op.order = order;
  op.n = n;
  op.h = h;
  op.x0 = x0;
  op.P = h * punit;
  op.D.resize(n, n);
  op.Q.resize(n, n);
  std::vector<Triplet> qt;
  qt.reserve(dt.size());
  std::vector<Triplet> ddt;
  ddt.reserve(dt.size());
  for (const auto& t : dt) {
    qt.emplace_back(t.row(), t.col(), punit[t.row()] * t.value());
    ddt.emplace_back(t.row(), t.col(), t.value() / h);
  }
  op.Q.setFromTriplets(qt.begin(), qt.end());
  op.D.setFromTriplets(ddt.begin(), ddt.end());
  return op;
}

/// Restriction from volume nodes to a subset of surface nodes.
struct Restriction {
  int n_volume = 0;
  std::vector<int> rows;  // volume index picked by each surface row

  int n_surface() const { return static_cast<int>(rows.size()); }

  Vec apply(const Vec& v) const {
    Vec s(n_surface());
    for (int k = 0; k < n_surface(); ++k) s[k] = v[rows[static_cast<std::size_t>(k)]];
    return s;
  }

  Vec apply_transpose(const Vec& s) const {
    Vec v = Vec::Zero(n_volume);
    for (int k = 0; k < n_surface(); ++k) v[rows[static_cast<std::size_t>(k)]] += s[k];
    return v;
  }

  SpMat matrix() const {
    SpMat e(n_surface(), n_volume);
    std::vector<Triplet> t;
    for (int k = 0; k < n_surface(); ++k) t.emplace_back(k, rows[static_cast<std::size_t>(k)], 1.0);
    e.setFromTriplets(t.begin(), t.end());
    return e;
  }
};

/// E restricting to the two end nodes, in the order (start, end).
inline Restriction end_points(int n) { return Restriction{n, {0, n - 1}}; }

/// Interface SAT penalty pair acting on the jump between the duplicated
/// interface nodes. The left row receives sigma_left*(u_L - u_R)/P_L, the
/// right row sigma_right*(u_R - u_L)/P_R.
struct InterfacePenalty {
  double sigma_left = -0.5;
  double sigma_right = 0.5;
};

struct MultiblockOperator {
  std::vector<SbpOperator1D> blocks;
  std::vector<InterfacePenalty> penalties;  // one per interface
  std::vector<int> offsets;                 // first global index of each block
  int n = 0;
  Vec P;
  SpMat Q;
  SpMat D;

  int start() const { return 0; }
  int end() const { return n - 1; }

  /// Block index owning global node i.
  int block_of(int i) const {
    int b = 0;
    while (b + 1 < static_cast<int>(offsets.size()) && i >= offsets[static_cast<std::size_t>(b + 1)]) ++b;
    return b;
  }

  Vec nodes() const {
    Vec x(n);
    for (std::size_t b = 0; b < blocks.size(); ++b) x.segment(offsets[b], blocks[b].n) = blocks[b].nodes();
    return x;
  }
};

/// Concatenates blocks (duplicate interface nodes) and adds SAT interface
/// coupling. Adjacent blocks must meet at the same coordinate.
inline MultiblockOperator couple_blocks(std::vector<SbpOperator1D> blocks,
                                        std::vector<InterfacePenalty> penalties) {
  if (blocks.empty()) throw InvalidArgument("couple_blocks: no blocks");
  if (penalties.size() + 1 != blocks.size())
    throw InvalidArgument("couple_blocks: need one penalty pair per interface");
  for (std::size_t b = 0; b + 1 < blocks.size(); ++b) {
    double xl = blocks[b].x_end();
    double xr = blocks[b + 1].x0;
    double scale = std::max({1.0, std::abs(xl), std::abs(xr)});
    if (std::abs(xl - xr) > 1e-12 * scale)
      throw InvalidArgument("couple_blocks: interface locations differ (" + std::to_string(xl) +
                            " vs " + std::to_string(xr) + ")");
  }

  MultiblockOperator mb;
  mb.offsets.reserve(blocks.size());
  for (const auto& b : blocks) {
    mb.offsets.push_back(mb.n);
    mb.n += b.n;
  }
  mb.P.resize(mb.n);
  std::vector<Triplet> qt;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const int off = mb.offsets[b];
    mb.P.segment(off, blocks[b].n) = blocks[b].P;
    for (int k = 0; k < blocks[b].Q.outerSize(); ++k)
      for (SpMat::InnerIterator it(blocks[b].Q, k); it; ++it)
        qt.emplace_back(off + it.row(), off + it.col(), it.value());
  }
  for (std::size_t f = 0; f < penalties.size(); ++f) {
    const int l = mb.offsets[f] + blocks[f].n - 1;
    const int r = mb.offsets[f + 1];
    const auto& s = penalties[f];
    qt.emplace_back(l, l, s.sigma_left);
    qt.emplace_back(l, r, -s.sigma_left);
    qt.emplace_back(r, r, s.sigma_right);
    qt.emplace_back(r, l, -s.sigma_right);
  }
  mb.Q.resize(mb.n, mb.n);
  mb.Q.setFromTriplets(qt.begin(), qt.end());
  mb.D = diag_sparse(mb.P.cwiseInverse()) * mb.Q;
  mb.D.makeCompressed();
  mb.blocks = std::move(blocks);
  mb.penalties = std::move(penalties);
  return mb;
}

inline MultiblockOperator couple_blocks(const SbpOperator1D& left, const SbpOperator1D& right,
                                        InterfacePenalty penalty = {}) {
  return couple_blocks(std::vector<SbpOperator1D>{left, right}, std::vector<InterfacePenalty>{penalty});
}

/// ||Q + Q^T - (-e_s e_s^T + e_e e_e^T)||_max.
template <class Op>
double sbp_residual(const Op& op) {
  const int n = static_cast<int>(op.Q.rows());
  SpMat boundary(n, n);
  std::vector<Triplet> t{{0, 0, -1.0}, {n - 1, n - 1, 1.0}};
  boundary.setFromTriplets(t.begin(), t.end());
  SpMat qt = op.Q.transpose();
  SpMat r = op.Q + qt - boundary;
  return max_abs(r);
}

}  // namespace alesbp
