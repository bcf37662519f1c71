#pragma once

#include <Eigen/Dense>
#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/jacobi_elliptic.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <ostream>
#include <vector>

#include "hkl2/core/error.hpp"
#include "hkl2/core/format.hpp"
#include "hkl2/core/numeric.hpp"
#include "hkl2/core/quadrature.hpp"

// Nahm's equations B_i' + [B_0, B_i] = [B_j, B_k] (i, j, k cyclic) for
// anti-hermitian k x k matrices on a truncated interval [lo, hi].

namespace hkl2::nahm {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Quadruple = std::array<Mat, 4>;

inline Mat bracket(const Mat& a, const Mat& b) { return a * b - b * a; }

/// Real part of tr(a b); exact for anti-hermitian a, b.
inline double trace_product(const Mat& a, const Mat& b) { return (a.cwiseProduct(b.transpose())).sum().real(); }

inline double max_norm(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

struct ResidueTriple {
  int k = 2;
  std::array<Mat, 3> rho;

  const Mat& operator[](int i) const { return rho.at(i - 1); }

  /// max over cyclic (i, j, k) of |[rho_j, rho_k] + rho_i|.
  double bracket_residual() const {
    double r = 0.0;
    for (int i = 0; i < 3; ++i) r = std::max(r, max_norm(bracket(rho[(i + 1) % 3], rho[(i + 2) % 3]) + rho[i]));
    return r;
  }

  double trace_residual() const {
    double r = 0.0;
    for (const auto& m : rho) r = std::max(r, std::abs(m.trace()));
    return r;
  }

  /// Dimension of the commutant {M : [M, rho_i] = 0}; 1 for an irreducible triple.
  int commutant_dimension() const {
    const int d = k * k;
    Eigen::MatrixXcd op(3 * d, d);
    const Mat id = Mat::Identity(k, k);
    for (int i = 0; i < 3; ++i) {
      for (int c = 0; c < d; ++c) {
        Mat e = Mat::Zero(k, k);
        e(c % k, c / k) = 1.0;
        const Mat b = bracket(e, rho[i]);
        op.block(i * d, c, d, 1) = Eigen::Map<const Eigen::VectorXcd>(b.data(), d);
      }
    }
    return d - numeric::rank(op);
  }
};

/// rho_i = i J_i for the spin (k-1)/2 representation; k = 2 gives (i/2) Pauli_i.
inline ResidueTriple standard_residues(int k = 2) {
  if (k < 2) throw DomainError("standard_residues: k must be at least 2");
  const double j = 0.5 * (k - 1);
  Mat jp = Mat::Zero(k, k), jz = Mat::Zero(k, k);
  for (int a = 0; a < k; ++a) {
    const double m = j - a;
    jz(a, a) = m;
    if (a > 0) jp(a - 1, a) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  const Mat jm = jp.adjoint();
  const cplx i(0.0, 1.0);
  ResidueTriple t;
  t.k = k;
  t.rho[0] = i * 0.5 * (jp + jm);
  t.rho[1] = i * (-0.5 * i) * (jp - jm);
  t.rho[2] = i * jz;
  return t;
}

inline Mat pauli(int a) {
  Mat m = Mat::Zero(2, 2);
  const cplx i(0.0, 1.0);
  if (a == 1) m << 0.0, 1.0, 1.0, 0.0;
  if (a == 2) m << 0.0, -i, i, 0.0;
  if (a == 3) m << 1.0, 0.0, 0.0, -1.0;
  if (a < 1 || a > 3) throw DomainError("pauli index must be 1, 2 or 3");
  return m;
}

struct Grid {
  double lo = 0.0;
  double hi = 1.0;
  int n = 3;

  static Grid make(double lo, double hi, int n) {
    if (n < 3) throw DomainError("grid too coarse: need at least 3 nodes");
    if (!(lo < hi)) throw DomainError("grid: need lo < hi");
    return {lo, hi, n};
  }
  double h() const { return (hi - lo) / (n - 1); }
  double s(int i) const { return i == n - 1 ? hi : lo + i * h(); }
  bool same(const Grid& o) const { return lo == o.lo && hi == o.hi && n == o.n; }
};

/// Samples of a quadruple of matrix paths on a grid.
struct Path {
  Grid grid;
  std::array<std::vector<Mat>, 4> m;

  int k() const { return static_cast<int>(m[0].front().rows()); }
  Quadruple at(int i) const { return {m[0][i], m[1][i], m[2][i], m[3][i]}; }
};

struct NahmState {
  Path B;
  ResidueTriple rho;
  double epsilon = 0.0;

  const Grid& grid() const { return B.grid; }
};

struct TangentState {
  Path A;

  const Grid& grid() const { return A.grid; }
};

inline Path sample(const Grid& g, const std::function<Quadruple(double)>& f) {
  Path p;
  p.grid = g;
  for (auto& v : p.m) v.reserve(g.n);
  for (int i = 0; i < g.n; ++i) {
    const Quadruple q = f(g.s(i));
    for (int a = 0; a < 4; ++a) p.m[a].push_back(q[a]);
  }
  return p;
}

namespace detail {

constexpr int stencil = 9;

/// d/ds of samples on a uniform grid with 9-point (eighth order) stencils,
/// one-sided near the ends. Written on differences so constants give exactly 0.
inline std::vector<Mat> derivative(const Grid& g, const std::vector<Mat>& v) {
  if (g.n < stencil) throw DomainError("grid too coarse for the derivative stencil");
  static const std::array<std::vector<double>, stencil> weights = [] {
    std::array<std::vector<double>, stencil> w;
    std::vector<double> nodes(stencil);
    for (int j = 0; j < stencil; ++j) nodes[j] = j;
    for (int c = 0; c < stencil; ++c) w[c] = numeric::fornberg_weights(c, nodes, 1);
    return w;
  }();
  const double h = g.h();
  std::vector<Mat> d(g.n);
  for (int i = 0; i < g.n; ++i) {
    const int start = std::clamp(i - stencil / 2, 0, g.n - stencil);
    const auto& w = weights[i - start];
    Mat acc = Mat::Zero(v[i].rows(), v[i].cols());
    for (int j = 0; j < stencil; ++j)
      if (start + j != i) acc += w[j] * (v[start + j] - v[i]);
    d[i] = acc / h;
  }
  return d;
}

inline double simpson(const Grid& g, const std::vector<double>& y) {
  if (g.n % 2 == 0) throw DimensionMismatch("quadrature needs an odd number of grid nodes");
  return quadrature::simpson(y, g.h());
}

} // namespace detail

/// max over nodes and the three equations of |B_i' + [B_0, B_i] - [B_j, B_k]|.
inline double nahm_residual(const NahmState& st) {
  const Path& b = st.B;
  double r = 0.0;
  for (int i = 1; i <= 3; ++i) {
    const int j = i % 3 + 1, k = j % 3 + 1;
    const auto d = detail::derivative(b.grid, b.m[i]);
    for (int n = 0; n < b.grid.n; ++n)
      r = std::max(r, max_norm(d[n] + bracket(b.m[0][n], b.m[i][n]) - bracket(b.m[j][n], b.m[k][n])));
  }
  return r;
}

/// Scalar profiles (f1, f2, f3) with B_i = f_i rho_i, B_0 = 0, solving
/// f_i' = -f_j f_k.
using EulerTop = std::function<std::array<double, 3>(double)>;

inline NahmState euler_top_state(const Grid& g, const EulerTop& f, const ResidueTriple& rho, double epsilon) {
  NahmState st;
  st.rho = rho;
  st.epsilon = epsilon;
  st.B = sample(g, [&](double s) {
    const auto v = f(s);
    return Quadruple{Mat::Zero(rho.k, rho.k), v[0] * rho[1], v[1] * rho[2], v[2] * rho[3]};
  });
  return st;
}

inline EulerTop one_pole_profile() {
  return [](double s) { return std::array<double, 3>{1.0 / s, 1.0 / s, 1.0 / s}; };
}

/// One-pole family through 1/s: f1 = f2 = l / sinh(l s), f3 = l coth(l s)
/// with mu = l^2, continued to mu < 0 by the trigonometric functions.
inline EulerTop axial_profile(double mu) {
  return [mu](double s) {
    if (mu == 0.0) return std::array<double, 3>{1.0 / s, 1.0 / s, 1.0 / s};
    if (mu > 0.0) {
      const double l = std::sqrt(mu);
      return std::array<double, 3>{l / std::sinh(l * s), l / std::sinh(l * s), l / std::tanh(l * s)};
    }
    const double l = std::sqrt(-mu);
    return std::array<double, 3>{l / std::sin(l * s), l / std::sin(l * s), l / std::tan(l * s)};
  };
}

/// Two-pole data on (0, 2): f1 = D cn/sn, f2 = D dn/sn, f3 = D/sn at argument
/// D s with D = K(k). Arguments stay below K/2: the reflection
/// f(2 - s) = (-f1, f2, f3)(s) and the quarter-period shift
/// f(1 - x/D) = (D k' sn/cn, D k'/cn, D dn/cn)(x) cover the rest.
inline EulerTop elliptic_profile(double modulus) {
  if (!(modulus >= 0.0 && modulus < 1.0)) throw DomainError("elliptic modulus must lie in [0, 1)");
  const double d = boost::math::ellint_1(modulus);
  const double kp = std::sqrt((1.0 - modulus) * (1.0 + modulus));
  return [modulus, d, kp](double s) {
    if (!(s > 0.0 && s < 2.0)) throw DomainError("elliptic profile defined on (0, 2)");
    const bool reflect = s > 1.0;
    const double t = reflect ? 2.0 - s : s;
    double cn = 0.0, dn = 0.0;
    std::array<double, 3> f;
    if (t <= 0.5) {
      const double sn = boost::math::jacobi_elliptic(modulus, d * t, &cn, &dn);
      f = {d * cn / sn, d * dn / sn, d / sn};
    } else {
      const double sn = boost::math::jacobi_elliptic(modulus, d * (1.0 - t), &cn, &dn);
      f = {d * kp * sn / cn, d * kp / cn, d * dn / cn};
    }
    if (reflect) f[0] = -f[0];
    return f;
  };
}

inline NahmState one_pole_solution(double lo, double hi, int n, const ResidueTriple& rho = standard_residues()) {
  if (!(lo > 0.0)) throw DomainError("one-pole solution needs lo > 0");
  return euler_top_state(Grid::make(lo, hi, n), one_pole_profile(), rho, lo);
}

/// Two-pole solution on [eps, 2 - eps].
inline NahmState two_pole_solution(double modulus, double epsilon, int n) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("two-pole solution needs 0 < eps < 1");
  return euler_top_state(Grid::make(epsilon, 2.0 - epsilon, n), elliptic_profile(modulus), standard_residues(2),
                         epsilon);
}

// ---------------------------------------------------------------------------
// gauge and translations

/// A path of matrices with its derivative.
struct MatrixPath {
  std::function<Mat(double)> value;
  std::function<Mat(double)> derivative;
};

/// exp(t Z) for anti-hermitian Z.
inline Mat exp_antihermitian(const Mat& z, double t = 1.0) {
  const Eigen::SelfAdjointEigenSolver<Mat> es(cplx(0.0, -1.0) * z);
  const Eigen::VectorXcd phase = (cplx(0.0, 1.0) * t * es.eigenvalues().cast<cplx>()).array().exp();
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

/// g(s) = exp(amp sin^2(pi (s - lo)/(hi - lo)) Z), the identity at both ends.
inline MatrixPath bump_gauge(const Mat& z, double lo, double hi, double amp) {
  const double w = std::numbers::pi / (hi - lo);
  auto phi = [=](double s) { return amp * std::pow(std::sin(w * (s - lo)), 2); };
  auto dphi = [=](double s) { return amp * w * std::sin(2.0 * w * (s - lo)); };
  return {[=](double s) { return exp_antihermitian(z, phi(s)); },
          [=](double s) { return Mat(dphi(s) * z * exp_antihermitian(z, phi(s))); }};
}

/// B_0 -> g B_0 g^-1 - g' g^-1, B_i -> g B_i g^-1 for g unitary and equal to
/// the identity at both ends.
inline NahmState gauge_transform(const NahmState& st, const MatrixPath& g, double tol = 1e-10) {
  const Grid& gr = st.grid();
  const int k = st.B.k();
  const Mat id = Mat::Identity(k, k);
  if (max_norm(g.value(gr.lo) - id) > tol || max_norm(g.value(gr.hi) - id) > tol)
    throw DomainError("gauge_transform: g must be the identity at both ends");
  NahmState out = st;
  for (int n = 0; n < gr.n; ++n) {
    const double s = gr.s(n);
    const Mat gv = g.value(s);
    if (max_norm(gv * gv.adjoint() - id) > tol) throw DomainError("gauge_transform: g is not unitary");
    const Mat gi = gv.adjoint();
    out.B.m[0][n] = gv * st.B.m[0][n] * gi - g.derivative(s) * gi;
    for (int a = 1; a <= 3; ++a) out.B.m[a][n] = gv * st.B.m[a][n] * gi;
  }
  return out;
}

/// A_a -> g A_a g^-1, the tangent to the transformed family.
inline TangentState gauge_transform(const TangentState& t, const MatrixPath& g) {
  TangentState out = t;
  for (int n = 0; n < t.grid().n; ++n) {
    const Mat gv = g.value(t.grid().s(n));
    for (int a = 0; a < 4; ++a) out.A.m[a][n] = gv * t.A.m[a][n] * gv.adjoint();
  }
  return out;
}

/// B_i -> B_i + i x_i Id for i = 1, 2, 3.
inline NahmState translation_action(const NahmState& st, const Eigen::Vector3d& x) {
  NahmState out = st;
  const Mat id = Mat::Identity(st.B.k(), st.B.k());
  for (int a = 1; a <= 3; ++a)
    for (auto& m : out.B.m[a]) m += cplx(0.0, x(a - 1)) * id;
  return out;
}

inline TangentState translation_tangent(const Grid& g, int k, const Eigen::Vector3d& x) {
  const Mat id = Mat::Identity(k, k);
  TangentState t;
  t.A = sample(g, [&](double) {
    return Quadruple{Mat::Zero(k, k), cplx(0.0, x(0)) * id, cplx(0.0, x(1)) * id, cplx(0.0, x(2)) * id};
  });
  return t;
}

/// sqrt of the integral of sum_a |A_a|^2 (Frobenius), by Simpson's rule.
inline double tangent_norm(const TangentState& t) {
  std::vector<double> y(t.grid().n);
  for (int n = 0; n < t.grid().n; ++n)
    for (int a = 0; a < 4; ++a) y[n] += t.A.m[a][n].squaredNorm();
  return std::sqrt(detail::simpson(t.grid(), y));
}

// ---------------------------------------------------------------------------
// linearisation and the symplectic form

/// max residual of A_i' + [A_0, B_i] + [B_0, A_i] - [A_j, B_k] - [B_j, A_k].
inline double linearized_residual(const TangentState& t, const NahmState& st) {
  if (!t.grid().same(st.grid())) throw DimensionMismatch("linearized_residual: grid mismatch");
  const Path& a = t.A;
  const Path& b = st.B;
  double r = 0.0;
  for (int i = 1; i <= 3; ++i) {
    const int j = i % 3 + 1, k = j % 3 + 1;
    const auto d = detail::derivative(a.grid, a.m[i]);
    for (int n = 0; n < a.grid.n; ++n) {
      const Mat res = d[n] + bracket(a.m[0][n], b.m[i][n]) + bracket(b.m[0][n], a.m[i][n]) -
                      bracket(a.m[j][n], b.m[k][n]) - bracket(b.m[j][n], a.m[k][n]);
      r = std::max(r, max_norm(res));
    }
  }
  return r;
}

/// Central difference (B(t0 + d) - B(t0 - d)) / 2d of a one-parameter family.
inline TangentState family_tangent(const std::function<NahmState(double)>& family, double t0, double delta) {
  const NahmState p = family(t0 + delta), m = family(t0 - delta);
  if (!p.grid().same(m.grid())) throw DimensionMismatch("family_tangent: grid mismatch");
  TangentState t;
  t.A.grid = p.grid();
  for (int a = 0; a < 4; ++a) {
    t.A.m[a].resize(p.grid().n);
    for (int n = 0; n < p.grid().n; ++n) t.A.m[a][n] = (p.B.m[a][n] - m.B.m[a][n]) / (2.0 * delta);
  }
  return t;
}

/// Integral of -tr(A0 C1) + tr(A1 C0) + tr(A2 C3) - tr(A3 C2) by Simpson's rule.
inline double symplectic_form(const TangentState& a, const TangentState& c) {
  if (!a.grid().same(c.grid())) throw DimensionMismatch("symplectic_form: grid mismatch");
  std::vector<double> y(a.grid().n);
  for (int n = 0; n < a.grid().n; ++n) {
    const auto& A = a.A.m;
    const auto& C = c.A.m;
    y[n] = -trace_product(A[0][n], C[1][n]) + trace_product(A[1][n], C[0][n]) + trace_product(A[2][n], C[3][n]) -
           trace_product(A[3][n], C[2][n]);
  }
  return detail::simpson(a.grid(), y);
}

/// psi(s) = -rho_1 + (s - lo)(hi - s) Z, admissible for the rotation field.
inline MatrixPath admissible_psi(const ResidueTriple& rho, double lo, double hi, const Mat& z) {
  const Mat r1 = rho[1];
  return {[=](double s) { return Mat(-r1 + (s - lo) * (hi - s) * z); },
          [=](double s) { return Mat(((hi - s) - (s - lo)) * z); }};
}

/// X = (psi' + [B0, psi], [B1, psi], B3 + [B2, psi], -B2 + [B3, psi]) with
/// psi = -rho_1 at both ends.
inline TangentState rotation_field(const NahmState& st, const MatrixPath& psi, double tol = 1e-10) {
  const Grid& g = st.grid();
  const Mat r1 = st.rho[1];
  if (max_norm(psi.value(g.lo) + r1) > tol || max_norm(psi.value(g.hi) + r1) > tol)
    throw DomainError("rotation_field: psi must equal -rho_1 at both ends");
  TangentState x;
  x.A = sample(g, [](double) { return Quadruple{}; });
  for (int n = 0; n < g.n; ++n) {
    const double s = g.s(n);
    const Mat p = psi.value(s);
    const auto& B = st.B.m;
    x.A.m[0][n] = psi.derivative(s) + bracket(B[0][n], p);
    x.A.m[1][n] = bracket(B[1][n], p);
    x.A.m[2][n] = B[3][n] + bracket(B[2][n], p);
    x.A.m[3][n] = -B[2][n] + bracket(B[3][n], p);
  }
  return x;
}

struct ContractionResult {
  double epsilon = 0.0;
  double h = 0.0;
  double nahm_residual = 0.0;
  double tangent_residual = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double boundary = 0.0;
  /// |lhs - rhs - boundary| relative to the largest of the three terms.
  double rel_err = 0.0;
  /// |lhs - rhs| / |rhs|, the deviation from the identity with the boundary dropped.
  double limit_err = 0.0;
};

/// lhs = symplectic_form(A, X), rhs = -int tr(A2 B2 + A3 B3), boundary =
/// [tr(A1 psi)] between the ends of the grid.
inline ContractionResult contraction_identity(const NahmState& st, const TangentState& a, const MatrixPath& psi,
                                              double tangent_tol = 1e-4) {
  if (!a.grid().same(st.grid())) throw DimensionMismatch("contraction_identity: grid mismatch");
  ContractionResult r;
  const Grid& g = st.grid();
  r.epsilon = st.epsilon;
  r.h = g.h();
  r.tangent_residual = linearized_residual(a, st);
  const double scale = std::max(1.0, max_norm(a.A.m[1][g.n / 2]));
  if (r.tangent_residual > tangent_tol * scale)
    throw ToleranceError("contraction_identity: tangent fails the linearised equations");
  const TangentState x = rotation_field(st, psi);
  r.lhs = symplectic_form(a, x);
  std::vector<double> y(g.n);
  for (int n = 0; n < g.n; ++n)
    y[n] = -(trace_product(a.A.m[2][n], st.B.m[2][n]) + trace_product(a.A.m[3][n], st.B.m[3][n]));
  r.rhs = detail::simpson(g, y);
  r.boundary = trace_product(a.A.m[1][g.n - 1], psi.value(g.hi)) - trace_product(a.A.m[1][0], psi.value(g.lo));
  const double ref = std::max({std::abs(r.lhs), std::abs(r.rhs), std::abs(r.boundary)});
  r.rel_err = ref > 0.0 ? std::abs(r.lhs - r.rhs - r.boundary) / ref : 0.0;
  r.limit_err = std::abs(r.rhs) > 0.0 ? std::abs(r.lhs - r.rhs) / std::abs(r.rhs) : std::abs(r.lhs - r.rhs);
  return r;
}

// ---------------------------------------------------------------------------
// reference scenarios

/// Gauge-transformed one-pole solution on [eps, 2 - eps] with the tangent of
/// the axial family at mu = 0 and a generic admissible psi.
struct Scenario {
  NahmState state;
  TangentState tangent;
  MatrixPath psi;
};

inline Mat generic_direction() {
  const cplx i(0.0, 1.0);
  return Mat(i * (0.3 * pauli(1) - 0.7 * pauli(2) + 0.4 * pauli(3)));
}

inline Scenario one_pole_scenario(double epsilon, int n, double delta = 1e-4) {
  const Grid g = Grid::make(epsilon, 2.0 - epsilon, n);
  const ResidueTriple rho = standard_residues(2);
  const cplx i(0.0, 1.0);
  const MatrixPath gauge = bump_gauge(Mat(i * (0.5 * pauli(3) + 0.2 * pauli(1))), g.lo, g.hi, 0.8);
  auto family = [&](double mu) { return euler_top_state(g, axial_profile(mu), rho, epsilon); };
  Scenario sc;
  sc.state = gauge_transform(family(0.0), gauge);
  sc.tangent = gauge_transform(family_tangent(family, 0.0, delta), gauge);
  sc.psi = admissible_psi(rho, g.lo, g.hi, generic_direction());
  return sc;
}

/// Two-pole data at the given modulus with the tangent along the modulus.
inline Scenario two_pole_scenario(double modulus, double epsilon, int n, double delta = 1e-4) {
  auto family = [&](double k) { return two_pole_solution(k, epsilon, n); };
  Scenario sc;
  sc.state = family(modulus);
  sc.tangent = family_tangent(family, modulus, delta);
  sc.psi = admissible_psi(sc.state.rho, sc.state.grid().lo, sc.state.grid().hi, generic_direction());
  return sc;
}

inline ContractionResult run(const Scenario& sc) {
  ContractionResult r = contraction_identity(sc.state, sc.tangent, sc.psi);
  r.nahm_residual = nahm_residual(sc.state);
  return r;
}

/// CSV rows: s, then Re and Im of every entry of B_0..B_3 in column-major order.
inline void write_csv(std::ostream& os, const NahmState& st) {
  const int k = st.B.k();
  os << "s";
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < k; ++c)
      for (int r = 0; r < k; ++r) os << ",B" << a << "_" << r << c << "_re,B" << a << "_" << r << c << "_im";
  os << "\n";
  for (int n = 0; n < st.grid().n; ++n) {
    os << format_double(st.grid().s(n));
    for (int a = 0; a < 4; ++a)
      for (int c = 0; c < k; ++c)
        for (int r = 0; r < k; ++r)
          os << "," << format_double(st.B.m[a][n](r, c).real()) << "," << format_double(st.B.m[a][n](r, c).imag());
    os << "\n";
  }
}

} // namespace hkl2::nahm
