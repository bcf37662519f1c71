#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

#include "hkl2/core/error.hpp"
#include "hkl2/core/numeric.hpp"
#include "hkl2/core/quadrature.hpp"
#include "hkl2/exterior_algebra.hpp"
#include "hkl2/exterior_calculus.hpp"

// Taub-NUT in Gibbons-Hawking form, g = V dx^2 + V^{-1} (dtau + alpha)^2 with
// V = 1 + m/r, coordinates (x1, x2, x3, tau), orientation dx1^dx2^dx3^dtau.

namespace hkl2::gh {

/// north: regular away from the negative x3-axis; south: away from the positive one.
enum class Patch { north, south };

struct GHData {
  double m = 1.0;
  double tau_period = 4.0 * std::numbers::pi;
  Patch patch = Patch::north;

  static GHData make(double m, double tau_period = -1.0, Patch patch = Patch::north) {
    if (!(m > 0.0)) throw DomainError("GHData: mass must be positive");
    GHData d{m, tau_period < 0.0 ? 4.0 * std::numbers::pi * m : tau_period, patch};
    if (!(d.tau_period > 0.0)) throw DomainError("GHData: tau period must be positive");
    return d;
  }

  GHData with_patch(Patch p) const { return {m, tau_period, p}; }
};

struct GHPoint {
  Eigen::Vector3d x = Eigen::Vector3d::UnitX();
  double tau = 0.0;

  Eigen::Vector4d coords() const { return {x(0), x(1), x(2), tau}; }
  static GHPoint from_coords(const Eigen::VectorXd& c) { return {Eigen::Vector3d(c(0), c(1), c(2)), c(3)}; }
};

inline double potential(double r, const GHData& d) { return 1.0 + d.m / r; }

inline double radius(const Eigen::Vector3d& x) {
  const double r = x.norm();
  if (!(r > 0.0)) throw DomainError("Gibbons-Hawking point at the nut r = 0");
  return r;
}

inline void check_patch(const Eigen::Vector3d& x, const GHData& d) {
  const double r = radius(x);
  const double gap = d.patch == Patch::north ? r + x(2) : r - x(2);
  if (gap <= 1e-10 * r) throw DomainError("point lies on the excluded axis of the gauge patch");
}

/// Components (alpha_1, alpha_2, alpha_3) of the connection with d alpha = *dV.
inline Eigen::Vector3d connection(const Eigen::Vector3d& x, const GHData& d) {
  check_patch(x, d);
  const double r = radius(x);
  const double c = d.patch == Patch::north ? -d.m / (r * (r + x(2))) : d.m / (r * (r - x(2)));
  return {-c * x(1), c * x(0), 0.0};
}

/// tau_south = tau_north + shift, the gauge change between the patches.
inline double patch_tau_shift(const Eigen::Vector3d& x, const GHData& d) {
  return -2.0 * d.m * std::atan2(x(1), x(0));
}

inline GHPoint change_patch(const GHPoint& p, const GHData& from) {
  const double s = patch_tau_shift(p.x, from);
  return {p.x, from.patch == Patch::north ? p.tau + s : p.tau - s};
}

inline Eigen::Vector3d grad_potential(const Eigen::Vector3d& x, const GHData& d) {
  const double r = radius(x);
  return -d.m * x / (r * r * r);
}

inline Eigen::Matrix4d metric_at(const GHPoint& p, const GHData& d) {
  const Eigen::Vector3d a = connection(p.x, d);
  const double v = potential(radius(p.x), d);
  Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
  g.topLeftCorner<3, 3>() = v * Eigen::Matrix3d::Identity() + a * a.transpose() / v;
  g.block<3, 1>(0, 3) = a / v;
  g.block<1, 3>(3, 0) = a.transpose() / v;
  g(3, 3) = 1.0 / v;
  return g;
}

inline ext::Metric metric(const GHPoint& p, const GHData& d) { return ext::Metric(metric_at(p, d)); }

/// theta = V^{-1}(dtau + alpha), coefficients on (dx1, dx2, dx3, dtau).
inline Eigen::Vector4d theta_form(const GHPoint& p, const GHData& d) {
  const Eigen::Vector3d a = connection(p.x, d);
  const double v = potential(radius(p.x), d);
  return {a(0) / v, a(1) / v, a(2) / v, 1.0 / v};
}

namespace detail {

/// Flat star on R^3 of a 1-form, as a 2-form in the 4-dim algebra.
inline ext::FormVector star3(const Eigen::Vector3d& w) {
  using ext::FormVector;
  using ext::MultiIndex;
  return FormVector::basis(4, {2, 3}, w(0)) + FormVector::basis(4, {1, 3}, -w(1)) + FormVector::basis(4, {1, 2}, w(2));
}

} // namespace detail

/// d theta = -V^{-2} dV ^ (dtau + alpha) + V^{-1} *dV.
inline ext::FormVector dtheta(const GHPoint& p, const GHData& d) {
  const Eigen::Vector3d a = connection(p.x, d);
  const Eigen::Vector3d dv = grad_potential(p.x, d);
  const double v = potential(radius(p.x), d);
  const ext::FormVector dvf = ext::FormVector::one_form(Eigen::Vector4d(dv(0), dv(1), dv(2), 0.0));
  const ext::FormVector conn = ext::FormVector::one_form(Eigen::Vector4d(a(0), a(1), a(2), 1.0));
  return (-1.0 / (v * v)) * ext::wedge(dvf, conn) + (1.0 / v) * detail::star3(dv);
}

inline ext::FormVector theta(const GHPoint& p, const GHData& d) {
  return ext::FormVector::one_form(theta_form(p, d));
}

/// Finite-difference exterior derivative of theta.
inline ext::FormVector dtheta_numeric(const GHPoint& p, const GHData& d, double h = 1e-3) {
  auto field = [&](const Eigen::VectorXd& c) { return theta(GHPoint::from_coords(c), d); };
  return ext::exterior_derivative(field, p.coords(), h);
}

/// Max coefficient of the finite-difference d(d theta).
inline double ddtheta_residual(const GHPoint& p, const GHData& d, double h = 1e-3) {
  auto field = [&](const Eigen::VectorXd& c) { return dtheta(GHPoint::from_coords(c), d); };
  return ext::exterior_derivative(field, p.coords(), h).max_abs();
}

/// Max coefficient of *d theta + d theta.
inline double anti_self_dual_residual(const GHPoint& p, const GHData& d) {
  const ext::FormVector w = dtheta(p, d);
  return (ext::hodge_star(w, metric(p, d)) + w).max_abs();
}

/// Closed-form density of d theta ^ *d theta against dx1 dx2 dx3 dtau.
inline double l2_density(double r, const GHData& d) {
  if (!(r > 0.0)) throw DomainError("l2_density: r must be positive");
  const double rm = r + d.m;
  return 2.0 * d.m * d.m / (r * rm * rm * rm);
}

/// Same density from the form itself: coefficient of d theta ^ *d theta.
inline double l2_density_form(const GHPoint& p, const GHData& d) {
  const ext::FormVector w = dtheta(p, d);
  return ext::wedge(w, ext::hodge_star(w, metric(p, d)))[ext::MultiIndex({1, 2, 3, 4})].real();
}

/// Integrand in r after integrating over the sphere and the circle.
inline double radial_integrand(double r, const GHData& d) {
  const double rm = r + d.m;
  return 8.0 * std::numbers::pi * d.m * d.m * r / (rm * rm * rm) * d.tau_period;
}

struct L2Result {
  double value = 0.0;
  double closed_form = 0.0;
  double rel_err = 0.0;
  double error_estimate = 0.0;
};

inline double l2_closed_form(const GHData& d) { return 4.0 * std::numbers::pi * d.m * d.tau_period; }

/// L^2 norm squared of d theta by adaptive radial quadrature on (0, inf).
inline L2Result l2_norm(const GHData& d, const quadrature::Settings& s = {}) {
  auto f = [&](double r) { return r > 0.0 ? radial_integrand(r, d) : 0.0; };
  const auto inner = quadrature::integrate(f, 0.0, d.m, s);
  const auto outer = quadrature::integrate(f, d.m, std::numeric_limits<double>::infinity(), s);
  L2Result res;
  res.value = inner.value + outer.value;
  res.error_estimate = inner.error + outer.error;
  res.closed_form = l2_closed_form(d);
  res.rel_err = std::abs(res.value - res.closed_form) / res.closed_form;
  return res;
}

/// Same integral restricted to eps <= r <= big.
inline double l2_norm_truncated(const GHData& d, double eps, double big, const quadrature::Settings& s = {}) {
  if (!(0.0 < eps && eps < big)) throw DomainError("l2_norm_truncated: need 0 < eps < R");
  return quadrature::integrate_log([&](double r) { return radial_integrand(r, d); }, eps, big, s).value;
}

/// Integral of |d theta|^2 over the shell r <= |x| <= 2r.
inline double shell_integral(const GHData& d, double r, const quadrature::Settings& s = {}) {
  return l2_norm_truncated(d, r, 2.0 * r, s);
}

struct TailDecay {
  std::vector<double> radii;
  std::vector<double> shells;
  double slope = 0.0;
};

inline TailDecay tail_decay(const GHData& d, const std::vector<double>& radii) {
  TailDecay t{radii, {}, 0.0};
  for (double r : radii) {
    if (!(r > 0.0)) throw DomainError("tail_decay: radii must be positive");
    t.shells.push_back(shell_integral(d, r));
  }
  t.slope = numeric::loglog_slope(t.radii, t.shells);
  return t;
}

/// Riemannian volume of the shell r <= |x| <= 2r (sqrt det g = V).
inline double shell_volume(const GHData& d, double r) {
  auto f = [&](double s) { return 4.0 * std::numbers::pi * s * s * potential(s, d) * d.tau_period; };
  return quadrature::integrate(f, r, 2.0 * r).value;
}

/// Pointwise norm |d theta|_g, which is decreasing in r.
inline double dtheta_norm(double r, const GHData& d) { return std::sqrt(l2_density(r, d) / potential(r, d)); }

/// Cutoff cross-term bound (K/r)(c1*2r + c0) sup_shell|d theta| vol(shell)^{1/2}
/// for a cutoff with |d chi_r| <= K/r and a field of growth c1*rho + c0.
inline double cutoff_cross_term(const GHData& d, double r, double k_cut, double c1, double c0) {
  return (k_cut / r) * (c1 * 2.0 * r + c0) * dtheta_norm(r, d) * std::sqrt(shell_volume(d, r));
}

struct RadialRow {
  double r = 0.0;
  double potential = 0.0;
  double density = 0.0;
  double asymptotic = 0.0;
};

inline std::vector<RadialRow> radial_profile(const GHData& d, const std::vector<double>& radii) {
  std::vector<RadialRow> rows;
  for (double r : radii) rows.push_back({r, potential(r, d), l2_density(r, d), 2.0 * d.m * d.m / std::pow(r, 4)});
  return rows;
}

/// Point with |x| = r in direction (polar angle, azimuth) and fibre coordinate tau.
inline GHPoint spherical_point(double r, double polar, double azimuth, double tau) {
  return {Eigen::Vector3d(r * std::sin(polar) * std::cos(azimuth), r * std::sin(polar) * std::sin(azimuth),
                          r * std::cos(polar)),
          tau};
}

} // namespace hkl2::gh
