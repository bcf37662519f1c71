#pragma once

#include <Eigen/Dense>

#include "hkl2/core/numeric.hpp"
#include "hkl2/exterior_algebra.hpp"

namespace hkl2::ext {

/// Exterior derivative of a form field at x by Richardson-extrapolated
/// central differences of every coefficient.
template <typename Field>
FormVector exterior_derivative(const Field& field, const Eigen::VectorXd& x, double h) {
  const int n = static_cast<int>(x.size());
  FormVector out(n);
  for (int i = 0; i < n; ++i) {
    auto along = [&](double t) {
      Eigen::VectorXd y = x;
      y(i) += t;
      return Eigen::VectorXcd(field(y).dense());
    };
    const Eigen::VectorXcd d = numeric::richardson_derivative(along, 0.0, h);
    out += dx_wedge(i, FormVector::from_dense(n, d));
  }
  return out;
}

/// Interior product of a vector with a form: (i_v a)(X_2..X_p) = a(v, X_2..X_p).
inline FormVector interior(const Eigen::VectorXd& v, const FormVector& a) {
  const int n = a.dim();
  if (v.size() != n) throw DimensionMismatch("interior: vector dimension mismatch");
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(Eigen::Index{1} << n);
  for (Mask m = 0; m < (Mask{1} << n); ++m) {
    if (a.coeff(m) == 0.0) continue;
    for (Mask rest = m; rest; rest &= rest - 1) {
      const int j = std::countr_zero(rest);
      const Mask bj = Mask{1} << j;
      acc(m & ~bj) += v(j) * static_cast<double>(wedge_sign(bj, m & ~bj)) * a.coeff(m);
    }
  }
  return FormVector::from_dense(n, std::move(acc));
}

/// Antisymmetric matrix w(a,b) of a 2-form (real part).
inline Eigen::MatrixXd two_form_matrix(const FormVector& w) {
  const int n = w.dim();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      m(a, b) = w.coeff((Mask{1} << a) | (Mask{1} << b)).real();
      m(b, a) = -m(a, b);
    }
  return m;
}

} // namespace hkl2::ext
