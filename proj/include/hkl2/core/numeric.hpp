#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "hkl2/core/error.hpp"

namespace hkl2 {

using cplx = std::complex<double>;

namespace numeric {

/// Singular values below rel_tol * sigma_max count as zero.
template <typename Derived>
int rank(const Eigen::MatrixBase<Derived>& m, double rel_tol = 1e-10) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<typename Derived::PlainObject> svd(m.eval());
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

/// Orthonormal basis (columns) of the right nullspace of m.
///
/// Throws ToleranceError when the singular-value gap around the cut is too
/// small to make the rank decision unambiguous.
template <typename Derived>
typename Derived::PlainObject nullspace(const Eigen::MatrixBase<Derived>& m,
                                        double rel_tol = 1e-10,
                                        double min_gap = 1e3) {
  using Plain = typename Derived::PlainObject;
  const Eigen::Index cols = m.cols();
  if (m.rows() == 0) return Plain::Identity(cols, cols);
  Eigen::JacobiSVD<Plain> svd(m.eval(), Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double top = s.size() > 0 ? s(0) : 0.0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * top) ++r;
  if (r > 0 && r < s.size() && s(r) > 0.0 && s(r - 1) / s(r) < min_gap)
    throw ToleranceError("nullspace: ambiguous rank decision");
  return svd.matrixV().rightCols(cols - r);
}

/// Spectral norm of the difference of the orthogonal projectors onto
/// span(a) and span(b); columns need not be orthonormal.
template <typename MA, typename MB>
double subspace_distance(const MA& a, const MB& b) {
  auto projector = [](const auto& m) {
    using Plain = typename std::decay_t<decltype(m)>::PlainObject;
    Eigen::HouseholderQR<Plain> qr(m);
    const Eigen::Index r = rank(m);
    Plain q = qr.householderQ() * Plain::Identity(m.rows(), r);
    return Plain(q * q.adjoint());
  };
  const auto diff = (projector(a) - projector(b)).eval();
  return Eigen::JacobiSVD<std::decay_t<decltype(diff)>>(diff).singularValues()(0);
}

/// Least-squares slope of log|y| against log x.
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw DimensionMismatch("loglog_slope: need two equally sized samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Slope of a straight-line fit of y against x.
inline double linear_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw DimensionMismatch("linear_slope: need two equally sized samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Finite-difference weights for the m-th derivative at x0 from arbitrary
/// nodes (Fornberg's recursion).
inline std::vector<double> fornberg_weights(double x0, std::span<const double> nodes, int m) {
  const int n = static_cast<int>(nodes.size()) - 1;
  std::vector<std::vector<std::vector<double>>> c(
      m + 1, std::vector<std::vector<double>>(n + 1, std::vector<double>(n + 1, 0.0)));
  c[0][0][0] = 1.0;
  double c1 = 1.0;
  for (int i = 1; i <= n; ++i) {
    double c2 = 1.0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      for (int k = 0; k <= std::min(i, m); ++k) {
        c[k][i][j] = ((nodes[i] - x0) * c[k][i - 1][j] - (k > 0 ? k * c[k - 1][i - 1][j] : 0.0)) / c3;
      }
    }
    for (int k = 0; k <= std::min(i, m); ++k) {
      c[k][i][i] = (c1 / c2) *
                   ((k > 0 ? k * c[k - 1][i - 1][i - 1] : 0.0) - (nodes[i - 1] - x0) * c[k][i - 1][i - 1]);
    }
    c1 = c2;
  }
  return c[m][n];
}

/// Central difference with one Richardson step: (4 D(h/2) - D(h)) / 3.
template <typename F>
auto richardson_derivative(F&& f, double x, double h) {
  auto central = [&](double step) { return ((f(x + step) - f(x - step)) / (2.0 * step)).eval(); };
  auto coarse = central(h);
  auto fine = central(h / 2.0);
  return ((4.0 * fine - coarse) / 3.0).eval();
}

/// Scalar overload of richardson_derivative.
template <typename F>
double richardson_derivative_scalar(F&& f, double x, double h) {
  auto central = [&](double step) { return (f(x + step) - f(x - step)) / (2.0 * step); };
  return (4.0 * central(h / 2.0) - central(h)) / 3.0;
}

/// Jacobian d f / d x of a vector map, columns by Richardson central differences.
template <typename F>
Eigen::MatrixXd jacobian(F&& f, const Eigen::VectorXd& x, double h) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd jac(f0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    auto along = [&](double t) {
      Eigen::VectorXd y = x;
      y(i) += t;
      return Eigen::VectorXd(f(y));
    };
    auto central = [&](double step) { return Eigen::VectorXd((along(step) - along(-step)) / (2.0 * step)); };
    jac.col(i) = (4.0 * central(h / 2.0) - central(h)) / 3.0;
  }
  return jac;
}

inline std::vector<double> geomspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = a * std::pow(b / a, n == 1 ? 0.0 : static_cast<double>(i) / (n - 1));
  return out;
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = a + (b - a) * (n == 1 ? 0.0 : static_cast<double>(i) / (n - 1));
  return out;
}

} // namespace numeric
} // namespace hkl2
