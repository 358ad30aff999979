#pragma once

// Cyclic Jacobi eigenvalue solver for small dense symmetric matrices.

#include "alesbp/error.hpp"
#include "alesbp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace alesbp {

struct JacobiOptions {
  double tol = 1e-12;   // off-diagonal Frobenius norm relative to ||S||_F
  int max_sweeps = 100;
};

struct SymmetricEigenResult {
  Vec values;  // ascending
  int sweeps = 0;
  double off_norm = 0.0;  // final off-diagonal Frobenius norm
};

namespace detail {
inline double off_diagonal_norm(const Mat& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}
}  // namespace detail

inline SymmetricEigenResult symmetric_eigen(const Mat& S, JacobiOptions opt = {}) {
  if (S.rows() != S.cols()) throw InvalidArgument("symmetric_eigen: matrix is not square");
  const Eigen::Index n = S.rows();
  const double scale = max_abs(S);
  if (max_abs(Mat(S - S.transpose())) > 1e-12 * scale)
    throw InvalidArgument("symmetric_eigen: matrix is not symmetric");

  Mat a = 0.5 * (S + S.transpose());
  const double fro = a.norm();
  SymmetricEigenResult res;
  if (n == 0) return res;

  double off = detail::off_diagonal_norm(a);
  while (off > opt.tol * fro) {
    if (res.sweeps == opt.max_sweeps)
      throw Error("symmetric_eigen: no convergence after " + std::to_string(opt.max_sweeps) + " sweeps");
    ++res.sweeps;
    // Threshold: early sweeps skip entries that are small relative to the
    // current mean off-diagonal magnitude.
    const double thresh = res.sweeps < 4 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        const double g = 100.0 * std::abs(apq);
        if (res.sweeps > 4 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
            std::abs(a(q, q)) + g == std::abs(a(q, q))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        if (std::abs(apq) <= thresh || apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
      }
    }
    off = detail::off_diagonal_norm(a);
  }
  res.off_norm = off;
  res.values = a.diagonal();
  std::sort(res.values.data(), res.values.data() + n);
  return res;
}

inline Vec symmetric_eigenvalues(const Mat& S, JacobiOptions opt = {}) {
  return symmetric_eigen(S, opt).values;
}

}  // namespace alesbp
