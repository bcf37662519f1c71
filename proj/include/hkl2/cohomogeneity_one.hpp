#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hkl2/core/error.hpp"
#include "hkl2/core/numeric.hpp"
#include "hkl2/core/quadrature.hpp"
#include "hkl2/exterior_algebra.hpp"
#include "hkl2/exterior_calculus.hpp"

// Bianchi IX metrics g = f^2 drho^2 + a^2 s1^2 + b^2 s2^2 + c^2 s3^2 with
// ds1 = s2^s3 (cyclic), and the invariant forms
// phi_i = F_i (ds_i - R_i drho^s_i), R_1 = fa/(bc), R_2 = fb/(ca), R_3 = fc/(ab).

namespace hkl2::bianchi {

struct Coefficients {
  double f = 1.0, a = 1.0, b = 1.0, c = 1.0;

  /// Coefficient of sigma_i (1-based).
  double scale(int axis) const { return axis == 1 ? a : axis == 2 ? b : c; }
};

/// Leading behaviour coefficient * t^exponent, with t = rho - lo at the lower
/// end, t = rho at infinity and t = hi - rho at a finite upper end.
struct Asymptote {
  double coefficient = 0.0;
  double exponent = 0.0;
};

struct EndpointData {
  std::array<Asymptote, 4> leading;  // f, a, b, c
};

enum class Endpoint { lower, upper };

inline const char* endpoint_name(Endpoint e) { return e == Endpoint::lower ? "lower" : "upper"; }

struct BianchiProfile {
  std::string name;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double rho_ref = 1.0;
  /// Coefficients as a function of the offset t = rho - lo, so that points
  /// close to the lower endpoint keep full relative precision.
  std::function<Coefficients(double)> coefficients;
  std::optional<EndpointData> lower;
  std::optional<EndpointData> upper;
  /// Axes whose forms are ruled out by an extra circle symmetry (a = b).
  std::array<bool, 3> circle_excluded{false, false, false};

  bool upper_infinite() const { return std::isinf(hi); }

  Coefficients at(double rho) const {
    if (!(rho > lo && rho < hi)) throw DomainError("profile evaluated outside the open interval");
    return coefficients(rho - lo);
  }

  Coefficients at_offset(double t) const {
    if (!(t > 0.0 && lo + t < hi)) throw DomainError("profile evaluated outside the open interval");
    return coefficients(t);
  }
};

inline void check_axis(int axis) {
  if (axis < 1 || axis > 3) throw DomainError("axis must be 1, 2 or 3");
}

inline double ratio_of(int axis, const Coefficients& k) {
  check_axis(axis);
  if (axis == 1) return k.f * k.a / (k.b * k.c);
  if (axis == 2) return k.f * k.b / (k.c * k.a);
  return k.f * k.c / (k.a * k.b);
}

inline double ratio(int axis, const BianchiProfile& p, double rho) { return ratio_of(axis, p.at(rho)); }

inline double ratio_at_offset(int axis, const BianchiProfile& p, double t) { return ratio_of(axis, p.at_offset(t)); }

// ---------------------------------------------------------------------------
// profiles

inline BianchiProfile eguchi_hanson_profile(double a_param) {
  if (!(a_param > 0.0)) throw DomainError("Eguchi-Hanson parameter must be positive");
  BianchiProfile p;
  p.name = "eguchi_hanson";
  p.lo = a_param;
  p.rho_ref = 2.0 * a_param;
  p.coefficients = [a_param](double t) {
    const double r = a_param + t;
    const double w = t * (r + a_param) * (r * r + a_param * a_param) / (r * r * r * r);
    return Coefficients{1.0 / std::sqrt(w), r, r, r * std::sqrt(w)};
  };
  const double s = std::sqrt(a_param);
  p.lower = EndpointData{{Asymptote{s / 2.0, -0.5}, {a_param, 0.0}, {a_param, 0.0}, {2.0 * s, 0.5}}};
  p.upper = EndpointData{{Asymptote{1.0, 0.0}, {1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}}};
  p.circle_excluded = {true, true, false};
  return p;
}

/// Taub-NUT in biaxial form: rho = r, f = sqrt(V), a = b = r sqrt(V), c = -m / sqrt(V).
inline BianchiProfile biaxial_taubnut_profile(double m) {
  if (!(m > 0.0)) throw DomainError("Taub-NUT mass must be positive");
  BianchiProfile p;
  p.name = "biaxial_taubnut";
  p.lo = 0.0;
  p.rho_ref = m;
  p.coefficients = [m](double r) {
    const double sv = std::sqrt(1.0 + m / r);
    return Coefficients{sv, r * sv, r * sv, -m / sv};
  };
  const double s = std::sqrt(m);
  p.lower = EndpointData{{Asymptote{s, -0.5}, {s, 0.5}, {s, 0.5}, {-s, 0.5}}};
  p.upper = EndpointData{{Asymptote{1.0, 0.0}, {1.0, 1.0}, {1.0, 1.0}, {-m, 0.0}}};
  p.circle_excluded = {true, true, false};
  return p;
}

/// Quintic C^2 step from 0 at x <= 0 to 1 at x >= 1.
inline double smoothstep5(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * (x * (6.0 * x - 15.0) + 10.0);
}

/// C-infinity step built from exp(-1/x).
inline double smooth_bump_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double u = std::exp(-1.0 / x), v = std::exp(-1.0 / (1.0 - x));
  return u / (u + v);
}

enum class Interpolant { smoothstep, exp_bump };

/// Model profile on (pi, inf): exactly f=-1, a=2rho-2pi, b=pi, c=-pi near pi and
/// f=-1, a=rho, b=rho, c=-2 far out, blended across a transition band.
inline BianchiProfile atiyah_hitchin_model_profile(Interpolant kind = Interpolant::smoothstep) {
  constexpr double pi = std::numbers::pi;
  const double t0 = kind == Interpolant::smoothstep ? pi + 1.0 : pi + 0.5;
  const double t1 = kind == Interpolant::smoothstep ? pi + 2.0 : pi + 3.0;
  const auto step = kind == Interpolant::smoothstep ? smoothstep5 : smooth_bump_step;
  BianchiProfile p;
  p.name = kind == Interpolant::smoothstep ? "atiyah_hitchin_model" : "atiyah_hitchin_model_bump";
  p.lo = pi;
  p.rho_ref = pi + 1.5;
  p.coefficients = [t0, t1, step](double t) {
    const double rho = pi + t;
    const double w = step((rho - t0) / (t1 - t0));
    const Coefficients near{-1.0, 2.0 * t, pi, -pi};
    const Coefficients far{-1.0, rho, rho, -2.0};
    return Coefficients{(1 - w) * near.f + w * far.f, (1 - w) * near.a + w * far.a, (1 - w) * near.b + w * far.b,
                        (1 - w) * near.c + w * far.c};
  };
  p.lower = EndpointData{{Asymptote{-1.0, 0.0}, {2.0, 1.0}, {pi, 0.0}, {-pi, 0.0}}};
  p.upper = EndpointData{{Asymptote{-1.0, 0.0}, {1.0, 1.0}, {1.0, 1.0}, {-2.0, 0.0}}};
  return p;
}

/// Change of variable rho = h(u), written on offsets: rho - lo = h(u - u_lo).
/// Near the lower end h(v) ~ lower_slope v; at infinity h(v) ~ upper_coeff v^upper_power.
struct Reparametrization {
  std::function<double(double)> h;
  std::function<double(double)> h_inverse;
  std::function<double(double)> h_prime;
  double lower_slope = 1.0;
  double upper_coeff = 1.0;
  double upper_power = 1.0;
};

inline BianchiProfile reparametrize(const BianchiProfile& p, const Reparametrization& r) {
  if (!p.upper_infinite()) throw DomainError("reparametrize supports profiles on (lo, inf)");
  BianchiProfile q = p;
  q.name = p.name + "_reparametrized";
  q.rho_ref = p.lo + r.h_inverse(p.rho_ref - p.lo);
  q.coefficients = [base = p.coefficients, r](double v) {
    Coefficients k = base(r.h(v));
    k.f *= r.h_prime(v);
    return k;
  };
  if (p.lower) {
    EndpointData e = *p.lower;
    for (auto& s : e.leading) s.coefficient *= std::pow(r.lower_slope, s.exponent);
    e.leading[0].coefficient *= r.lower_slope;
    q.lower = e;
  }
  if (p.upper) {
    EndpointData e = *p.upper;
    for (auto& s : e.leading) {
      s.coefficient *= std::pow(r.upper_coeff, s.exponent);
      s.exponent *= r.upper_power;
    }
    e.leading[0].coefficient *= r.upper_coeff * r.upper_power;
    e.leading[0].exponent += r.upper_power - 1.0;
    q.upper = e;
  }
  return q;
}

/// Offsets related by t = v + v^2/2.
inline Reparametrization quadratic_reparametrization() {
  Reparametrization r;
  r.h = [](double v) { return v + 0.5 * v * v; };
  r.h_inverse = [](double t) { return 2.0 * t / (1.0 + std::sqrt(1.0 + 2.0 * t)); };
  r.h_prime = [](double v) { return 1.0 + v; };
  r.lower_slope = 1.0;
  r.upper_coeff = 0.5;
  r.upper_power = 2.0;
  return r;
}

struct AsymptoticsCheck {
  double worst_relative_error = 0.0;
  bool consistent = true;
};

/// Compares coefficient values with the declared leading behaviour at points
/// close to each endpoint.
inline AsymptoticsCheck check_asymptotics(const BianchiProfile& p, double tol = 0.05) {
  AsymptoticsCheck out;
  auto compare = [&](const EndpointData& e, double offset, double t) {
    const Coefficients k = p.at_offset(offset);
    const std::array<double, 4> v{k.f, k.a, k.b, k.c};
    for (int i = 0; i < 4; ++i) {
      const double model = e.leading[i].coefficient * std::pow(t, e.leading[i].exponent);
      out.worst_relative_error = std::max(out.worst_relative_error, std::abs(v[i] - model) / std::abs(model));
    }
  };
  const double span = p.rho_ref - p.lo;
  if (p.lower) compare(*p.lower, 1e-7 * span, 1e-7 * span);
  if (p.upper) {
    if (p.upper_infinite()) {
      const double far = 1e7 * std::max(1.0, std::abs(p.rho_ref));
      compare(*p.upper, far - p.lo, far);
    } else {
      compare(*p.upper, p.hi - 1e-7 * (p.hi - p.rho_ref) - p.lo, 1e-7 * (p.hi - p.rho_ref));
    }
  }
  out.consistent = out.worst_relative_error <= tol;
  return out;
}

// ---------------------------------------------------------------------------
// closedness

namespace detail {

/// Coordinate x on offsets t = rho - lo in (0, length): log t when the interval
/// is unbounded, log(t / (length - t)) otherwise. Resolves both endpoints.
struct LogCoordinate {
  double length = 0.0;
  bool infinite = true;

  double x(double t) const { return infinite ? std::log(t) : std::log(t / (length - t)); }
  double t(double x) const {
    if (infinite) return std::exp(x);
    const double e = std::exp(-std::abs(x));
    return x >= 0 ? length / (1.0 + e) : length * e / (1.0 + e);
  }
  double dt(double x) const {
    if (infinite) return std::exp(x);
    const double e = std::exp(-std::abs(x));
    return length * e / ((1.0 + e) * (1.0 + e));
  }
};

} // namespace detail

/// F_i(rho) = exp(-int_{rho_ref}^{rho} R_i), tabulated in log form on the offset
/// t = rho - lo.
class ClosednessSolution {
public:
  ClosednessSolution(int axis, std::shared_ptr<const BianchiProfile> profile, double rho_ref, double depth = 1e-12,
                     double reach = 1e9)
      : axis_(axis), profile_(std::move(profile)), rho_ref_(rho_ref) {
    check_axis(axis);
    const BianchiProfile& p = *profile_;
    if (!(rho_ref > p.lo && rho_ref < p.hi)) throw DomainError("reference point must be interior");
    map_ = {p.hi - p.lo, p.upper_infinite()};
    const double span = rho_ref - p.lo;
    const double x0 = map_.x(span);
    const double xmin = map_.x(depth * span);
    const double xmax = map_.infinite ? map_.x(reach * span) : map_.x(map_.length - depth * (p.hi - rho_ref));
    std::vector<double> nodes;
    const double step = 0.25;
    for (double x = x0; x > xmin; x -= step) nodes.push_back(x);
    nodes.push_back(xmin);
    std::reverse(nodes.begin(), nodes.end());
    for (double x = x0 + step; x < xmax; x += step) nodes.push_back(x);
    nodes.push_back(xmax);
    // Captures by value: the integral outlives moves of this object.
    auto g = [axis = axis_, profile = profile_, map = map_](double x) {
      return ratio_at_offset(axis, *profile, map.t(x)) * map.dt(x);
    };
    quadrature::Settings s;
    s.rel_tol = 1e-11;
    integral_ = quadrature::CumulativeIntegral(g, nodes, x0, s);
  }

  int axis() const { return axis_; }
  const BianchiProfile& profile() const { return *profile_; }
  double rho_ref() const { return rho_ref_; }
  /// Offsets covered by the tabulation.
  double min_offset() const { return map_.t(integral_.lower()); }
  double max_offset() const { return map_.t(integral_.upper()); }

  double log_F_offset(double t) const {
    if (!(t > 0.0 && t < map_.length)) throw DomainError("closedness solution outside interval");
    return -integral_(map_.x(t));
  }
  double log_F(double rho) const { return log_F_offset(rho - profile_->lo); }
  double F(double rho) const { return std::exp(log_F(rho)); }

  /// log of 2 F^2 |R|, the density of phi ^ *phi against drho ^ s1 ^ s2 ^ s3.
  double log_density_offset(double t) const {
    return std::log(2.0) + 2.0 * log_F_offset(t) + std::log(std::abs(ratio_at_offset(axis_, *profile_, t)));
  }
  double log_density(double rho) const { return log_density_offset(rho - profile_->lo); }
  double density(double rho) const { return std::exp(log_density(rho)); }

  /// Integral of the density between two offsets, computed in the log coordinate.
  double integral_offset(double t0, double t1) const {
    auto g = [this](double x) { return std::exp(log_density_offset(map_.t(x)) + std::log(map_.dt(x))); };
    quadrature::Settings s;
    s.rel_tol = 1e-10;
    return quadrature::integrate(g, map_.x(t0), map_.x(t1), s).value;
  }
  double integral(double r0, double r1) const { return integral_offset(r0 - profile_->lo, r1 - profile_->lo); }

private:
  int axis_;
  std::shared_ptr<const BianchiProfile> profile_;
  double rho_ref_;
  detail::LogCoordinate map_;
  quadrature::CumulativeIntegral integral_;
};

inline ClosednessSolution solve_closedness(int axis, const BianchiProfile& p, double rho_ref) {
  return ClosednessSolution(axis, std::make_shared<const BianchiProfile>(p), rho_ref);
}

inline ClosednessSolution solve_closedness(int axis, const BianchiProfile& p) {
  return solve_closedness(axis, p, p.rho_ref);
}

inline double l2_density(const ClosednessSolution& s, double rho) { return s.density(rho); }

// ---------------------------------------------------------------------------
// coordinate model rho x SU(2), coordinates (rho, theta, phi, psi)

/// Rows: s1, s2, s3 on (drho, dtheta, dphi, dpsi); ds1 = s2 ^ s3 and cyclic.
inline Eigen::Matrix<double, 3, 4> sigma_coframe(double theta, double psi) {
  Eigen::Matrix<double, 3, 4> s;
  s << 0.0, -std::sin(psi), std::cos(psi) * std::sin(theta), 0.0,  //
      0.0, -std::cos(psi), -std::sin(psi) * std::sin(theta), 0.0,  //
      0.0, 0.0, -std::cos(theta), -1.0;
  return s;
}

inline ext::FormVector sigma_form(int axis, const Eigen::Vector4d& x) {
  check_axis(axis);
  const Eigen::Matrix<double, 3, 4> s = sigma_coframe(x(1), x(3));
  return ext::FormVector::one_form(Eigen::Vector4d(s.row(axis - 1).transpose()));
}

inline Eigen::Matrix4d coordinate_metric(const BianchiProfile& p, const Eigen::Vector4d& x) {
  const Coefficients k = p.at(x(0));
  const Eigen::Matrix<double, 3, 4> s = sigma_coframe(x(1), x(3));
  Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
  g(0, 0) = k.f * k.f;
  for (int i = 0; i < 3; ++i) g += k.scale(i + 1) * k.scale(i + 1) * s.row(i).transpose() * s.row(i);
  return g;
}

/// Orientation f a b c drho ^ s1 ^ s2 ^ s3 > 0, expressed relative to drho^dtheta^dphi^dpsi.
inline int coordinate_orientation(const BianchiProfile& p, const Eigen::Vector4d& x) {
  const Coefficients k = p.at(x(0));
  const double s = -k.f * k.a * k.b * k.c * std::sin(x(1));
  return s > 0 ? 1 : -1;
}

inline ext::Metric coordinate_metric_oriented(const BianchiProfile& p, const Eigen::Vector4d& x) {
  return ext::Metric(coordinate_metric(p, x), coordinate_orientation(p, x));
}

/// phi_i = F_i (s_j ^ s_k - R_i drho ^ s_i) at a coordinate point.
inline ext::FormVector ansatz_form(const ClosednessSolution& sol, const Eigen::Vector4d& x) {
  const int i = sol.axis(), j = i % 3 + 1, k = j % 3 + 1;
  const double f = sol.F(x(0));
  const double r = ratio(i, sol.profile(), x(0));
  const ext::FormVector drho = ext::FormVector::basis(4, {1});
  return f * (ext::wedge(sigma_form(j, x), sigma_form(k, x)) - r * ext::wedge(drho, sigma_form(i, x)));
}

inline double closedness_residual(const ClosednessSolution& sol, const Eigen::Vector4d& x, double h = 1e-4) {
  auto field = [&](const Eigen::VectorXd& y) { return ansatz_form(sol, Eigen::Vector4d(y)); };
  return ext::exterior_derivative(field, Eigen::VectorXd(x), h).max_abs();
}

/// max |phi ^ phi + phi ^ *phi| coefficient, with the profile orientation.
inline double anti_self_dual_residual(const ClosednessSolution& sol, const Eigen::Vector4d& x) {
  const ext::FormVector phi = ansatz_form(sol, x);
  const ext::FormVector star = ext::hodge_star(phi, coordinate_metric_oriented(sol.profile(), x));
  return std::max((star + phi).max_abs(), (ext::wedge(phi, phi) + ext::wedge(phi, star)).max_abs());
}

// ---------------------------------------------------------------------------
// integrability

enum class TruncationVerdict { integrable, divergent, inconclusive };

inline const char* verdict_name(TruncationVerdict v) {
  return v == TruncationVerdict::integrable ? "integrable"
         : v == TruncationVerdict::divergent ? "divergent"
                                             : "inconclusive";
}

struct TruncationSweep {
  std::vector<double> cutoffs;  // distance to the endpoint (or radius at infinity)
  std::vector<double> totals;   // integral from the cutoff to rho_ref
  TruncationVerdict verdict = TruncationVerdict::inconclusive;
};

struct EndpointAnalysis {
  Endpoint endpoint = Endpoint::lower;
  TruncationSweep sweep;
  double fitted_exponent = 0.0;
  bool exponent_integrable = false;
  bool integrable = false;
};

struct AxisVerdict {
  int axis = 1;
  bool integrable = false;
  std::optional<Endpoint> divergent_at;
  bool circle_excluded = false;
  EndpointAnalysis lower;
  EndpointAnalysis upper;
};

struct Classification {
  std::string profile;
  std::array<AxisVerdict, 3> axes;

  std::vector<int> integrable_axes() const {
    std::vector<int> out;
    for (const auto& a : axes)
      if (a.integrable) out.push_back(a.axis);
    return out;
  }
};

namespace detail {

inline TruncationVerdict judge(const std::vector<double>& increments, double total, bool overflow) {
  if (overflow) return TruncationVerdict::divergent;
  const std::size_t n = increments.size();
  const double last = increments[n - 1], prev = increments[n - 2];
  if (last <= 1e-14 * total) return TruncationVerdict::integrable;
  if (last >= 0.9 * prev) return TruncationVerdict::divergent;
  if (last <= 0.5 * prev && last <= 1e-3 * total) return TruncationVerdict::integrable;
  return TruncationVerdict::inconclusive;
}

} // namespace detail

/// Integrals from shrinking/expanding truncations towards one endpoint.
inline TruncationSweep truncation_sweep(const ClosednessSolution& s, Endpoint e, int steps = 9) {
  const BianchiProfile& p = s.profile();
  const double span = s.rho_ref() - p.lo, length = p.hi - p.lo;
  TruncationSweep out;
  std::vector<double> increments;
  bool overflow = false;
  double total = 0.0, prev = span;
  for (int j = 1; j <= steps; ++j) {
    double t, cut;
    if (e == Endpoint::lower) {
      cut = span * std::pow(10.0, -j);
      t = cut;
    } else if (p.upper_infinite()) {
      t = span * std::pow(10.0, j * 7.0 / steps);
      cut = p.lo + t;
    } else {
      cut = (p.hi - s.rho_ref()) * std::pow(10.0, -j);
      t = length - cut;
    }
    double piece = 0.0;
    try {
      piece = e == Endpoint::lower ? s.integral_offset(t, prev) : s.integral_offset(prev, t);
    } catch (const ConvergenceError&) {
      overflow = true;
    }
    if (!std::isfinite(piece)) overflow = true;
    if (overflow) break;
    total += piece;
    increments.push_back(piece);
    out.cutoffs.push_back(cut);
    out.totals.push_back(total);
    prev = t;
  }
  out.verdict = detail::judge(increments, total, overflow || increments.size() < 2);
  return out;
}

/// Power-law exponent of the density at an endpoint, fitted in log-log
/// coordinates; at infinity super-polynomial behaviour shows up as a huge slope.
inline double endpoint_exponent(const ClosednessSolution& s, Endpoint e) {
  const BianchiProfile& p = s.profile();
  const double span = s.rho_ref() - p.lo;
  std::vector<double> logt, logd;
  if (e == Endpoint::lower || p.upper_infinite()) {
    const auto grid = e == Endpoint::lower ? numeric::geomspace(1e-9, 1e-6, 7) : numeric::geomspace(1e6, 1e8, 7);
    for (double u : grid) {
      logt.push_back(std::log(u * span));
      logd.push_back(s.log_density_offset(u * span));
    }
  } else {
    for (double u : numeric::geomspace(1e-9, 1e-6, 7)) {
      const double d = u * (p.hi - s.rho_ref());
      logt.push_back(std::log(d));
      logd.push_back(s.log_density_offset(p.hi - p.lo - d));
    }
  }
  return numeric::linear_slope(logt, logd);
}

inline EndpointAnalysis analyse_endpoint(const ClosednessSolution& s, Endpoint e) {
  EndpointAnalysis a;
  a.endpoint = e;
  a.sweep = truncation_sweep(s, e);
  a.fitted_exponent = endpoint_exponent(s, e);
  const bool at_infinity = e == Endpoint::upper && s.profile().upper_infinite();
  a.exponent_integrable = at_infinity ? a.fitted_exponent < -1.0 : a.fitted_exponent > -1.0;
  if (a.sweep.verdict == TruncationVerdict::inconclusive ||
      (a.sweep.verdict == TruncationVerdict::integrable) != a.exponent_integrable)
    throw ToleranceError("classify_l2: truncation and exponent tests disagree for " + s.profile().name + " axis " +
                         std::to_string(s.axis()) + " at the " + endpoint_name(e) + " endpoint");
  a.integrable = a.exponent_integrable;
  return a;
}

inline AxisVerdict classify_axis(const BianchiProfile& p, int axis) {
  const auto sol = solve_closedness(axis, p);
  AxisVerdict v;
  v.axis = axis;
  v.circle_excluded = p.circle_excluded[axis - 1];
  v.lower = analyse_endpoint(sol, Endpoint::lower);
  v.upper = analyse_endpoint(sol, Endpoint::upper);
  v.integrable = v.lower.integrable && v.upper.integrable;
  if (!v.lower.integrable)
    v.divergent_at = Endpoint::lower;
  else if (!v.upper.integrable)
    v.divergent_at = Endpoint::upper;
  return v;
}

inline Classification classify_l2(const BianchiProfile& p) {
  Classification c;
  c.profile = p.name;
  for (int i = 1; i <= 3; ++i) c.axes[i - 1] = classify_axis(p, i);
  return c;
}

struct DensityRow {
  double rho = 0.0;
  std::array<double, 3> ratio{};
  std::array<double, 3> F{};
  std::array<double, 3> density{};
};

inline std::vector<DensityRow> density_profile(const BianchiProfile& p, const std::vector<double>& rhos) {
  std::vector<ClosednessSolution> sols;
  for (int i = 1; i <= 3; ++i) sols.push_back(solve_closedness(i, p));
  std::vector<DensityRow> rows;
  for (double rho : rhos) {
    DensityRow r;
    r.rho = rho;
    for (int i = 0; i < 3; ++i) {
      r.ratio[i] = ratio(i + 1, p, rho);
      r.F[i] = sols[i].F(rho);
      r.density[i] = sols[i].density(rho);
    }
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Taub-NUT identification with the Gibbons-Hawking chart

/// Euler point (r, theta, phi, psi) to Gibbons-Hawking (x1, x2, x3, tau) in the
/// north patch: x = r(sin theta cos phi, sin theta sin phi, cos theta), tau = m(psi + phi).
inline Eigen::Vector4d euler_to_gibbons_hawking(const Eigen::Vector4d& e, double m) {
  const double r = e(0), th = e(1), ph = e(2), ps = e(3);
  return {r * std::sin(th) * std::cos(ph), r * std::sin(th) * std::sin(ph), r * std::cos(th), m * (ps + ph)};
}

} // namespace hkl2::bianchi
