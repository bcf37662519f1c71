#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "hkl2/cohomogeneity_one.hpp"
#include "hkl2/core/error.hpp"
#include "hkl2/core/numeric.hpp"
#include "hkl2/exterior_algebra.hpp"
#include "hkl2/exterior_calculus.hpp"

// Hyperkahler quotients of flat C^n x C^n with coordinates (z, w). Real layout
// (Re z1, Im z1, ..., Re zn, Im zn, Re w1, Im w1, ...), flat metric, I = i,
// omega^c = omega_2 + i omega_3 = sum dz_j ^ dw_j, and moment maps normalised
// by d mu_a = i(Y) omega_a.

namespace hkl2::hk {

using cplx = std::complex<double>;
using ext::FormVector;

enum class Model { taubnut, calabi };

inline std::string model_name(Model m) { return m == Model::taubnut ? "taubnut" : "calabi"; }

inline Eigen::VectorXd to_real(const Eigen::VectorXcd& p) {
  Eigen::VectorXd x(2 * p.size());
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    x(2 * j) = p(j).real();
    x(2 * j + 1) = p(j).imag();
  }
  return x;
}

inline Eigen::VectorXcd to_complex(const Eigen::VectorXd& x) {
  if (x.size() % 2) throw DimensionMismatch("to_complex: odd real dimension");
  Eigen::VectorXcd p(x.size() / 2);
  for (Eigen::Index j = 0; j < p.size(); ++j) p(j) = {x(2 * j), x(2 * j + 1)};
  return p;
}

/// Flat T*C^n with its Kahler triple.
class FlatQuaternionicSpace {
public:
  explicit FlatQuaternionicSpace(int n) : n_(n) {
    if (n < 1) throw DomainError("FlatQuaternionicSpace: n must be positive");
    const int d = 4 * n;
    for (auto& o : omega_) o = Eigen::MatrixXd::Zero(d, d);
    auto put = [](Eigen::MatrixXd& m, int a, int b, double v) {
      m(a, b) += v;
      m(b, a) -= v;
    };
    for (int k = 0; k < 2 * n; ++k) put(omega_[0], 2 * k, 2 * k + 1, 1.0);
    for (int j = 0; j < n; ++j) {
      const int x = 2 * j, y = 2 * j + 1, u = 2 * (n + j), v = 2 * (n + j) + 1;
      put(omega_[1], x, u, 1.0);
      put(omega_[1], y, v, -1.0);
      put(omega_[2], x, v, 1.0);
      put(omega_[2], y, u, 1.0);
    }
    for (int a = 0; a < 3; ++a) structure_[a] = -omega_[a];
  }

  int n() const { return n_; }
  int real_dim() const { return 4 * n_; }
  /// omega_a(X, Y) = X^T omega(a) Y, a = 1, 2, 3.
  const Eigen::MatrixXd& omega(int a) const { return omega_.at(a - 1); }
  /// omega_a(X, Y) = g(I_a X, Y).
  const Eigen::MatrixXd& structure(int a) const { return structure_.at(a - 1); }

  cplx symplectic_c(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    return {x.dot(omega_[1] * y), x.dot(omega_[2] * y)};
  }

private:
  int n_;
  std::array<Eigen::MatrixXd, 3> omega_;
  std::array<Eigen::MatrixXd, 3> structure_;
};

struct Moments {
  double mu1 = 0.0;
  cplx muc = 0.0;

  double residual() const { return std::max(std::abs(mu1), std::abs(muc)); }
};

using AmbientField = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

/// Circle or line action with its moment triple.
///   taubnut (n = 2): (z1, z2, w1, w2) -> (e^{it} z1, z2 + t, e^{-it} w1, w2)
///   calabi:          (z, w) -> (e^{it} z, e^{-it} w)
struct GroupActionSpec {
  Model model = Model::taubnut;
  int n = 2;
  double level = 0.0;

  static GroupActionSpec taubnut(double level = 0.0) { return {Model::taubnut, 2, level}; }
  static GroupActionSpec calabi(int n = 2, double level = 0.5) {
    if (n < 2) throw DomainError("calabi model needs n >= 2");
    return {Model::calabi, n, level};
  }

  FlatQuaternionicSpace space() const { return FlatQuaternionicSpace(n); }
  int chart_dim() const { return 4 * n - 4; }

  void check(const Eigen::VectorXcd& p) const {
    if (p.size() != 2 * n) throw DimensionMismatch("point must have 2n complex coordinates");
  }

  Eigen::VectorXcd generator(const Eigen::VectorXcd& p) const {
    check(p);
    const cplx i(0.0, 1.0);
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(2 * n);
    if (model == Model::taubnut) {
      y(0) = i * p(0);
      y(1) = 1.0;
      y(2) = -i * p(2);
    } else {
      y.head(n) = i * p.head(n);
      y.tail(n) = -i * p.tail(n);
    }
    return y;
  }

  Eigen::VectorXcd act(double t, const Eigen::VectorXcd& p) const {
    check(p);
    const cplx e = std::polar(1.0, t);
    Eigen::VectorXcd q = p;
    if (model == Model::taubnut) {
      q(0) *= e;
      q(1) += t;
      q(2) /= e;
    } else {
      q.head(n) *= e;
      q.tail(n) /= e;
    }
    return q;
  }

  Moments moments(const Eigen::VectorXcd& p) const {
    check(p);
    const cplx i(0.0, 1.0);
    if (model == Model::taubnut)
      return {0.5 * (std::norm(p(2)) - std::norm(p(0))) + p(1).imag() + level, i * p(0) * p(2) + p(3)};
    return {0.5 * (p.tail(n).squaredNorm() - p.head(n).squaredNorm()) + level,
            i * (p.head(n).transpose() * p.tail(n)).value()};
  }
};

/// mu(theta_x) = theta_x(Y_x) for the canonical 1-form theta = sum w_j dz_j.
inline cplx cotangent_moment(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& base_field,
                             const Eigen::VectorXcd& p) {
  if (p.size() % 2) throw DimensionMismatch("cotangent_moment: odd complex dimension");
  const Eigen::Index n = p.size() / 2;
  const Eigen::VectorXcd y = base_field(p.head(n));
  if (y.size() != n) throw DimensionMismatch("cotangent_moment: base field dimension");
  return (p.tail(n).transpose() * y).value();
}

/// Rows d mu_1, d Re mu^c, d Im mu^c as real covectors: d mu_a = g(I_a Y, .).
inline Eigen::MatrixXd moment_differential(const GroupActionSpec& s, const Eigen::VectorXcd& p) {
  const FlatQuaternionicSpace q = s.space();
  const Eigen::VectorXd y = to_real(s.generator(p));
  Eigen::MatrixXd d(3, q.real_dim());
  for (int a = 1; a <= 3; ++a) d.row(a - 1) = (q.structure(a) * y).transpose();
  return d;
}

/// Representative on mu^{-1}(0) of the chart point u.
///   taubnut: u = (z1, w1), slice Re z2 = 0.
///   calabi:  u = (z2..zn, w2..wn), slice z1 real positive (fiducial vector e1).
inline Eigen::VectorXcd representative(const GroupActionSpec& s, const Eigen::VectorXd& u) {
  if (u.size() != s.chart_dim()) throw DimensionMismatch("representative: chart dimension");
  const cplx i(0.0, 1.0);
  const int n = s.n;
  Eigen::VectorXcd p(2 * n);
  if (s.model == Model::taubnut) {
    const cplx z1(u(0), u(1)), w1(u(2), u(3));
    p << z1, i * (0.5 * (std::norm(z1) - std::norm(w1)) - s.level), w1, -i * z1 * w1;
    return p;
  }
  cplx pair = 0.0;
  double b = 2.0 * s.level;
  for (int j = 1; j < n; ++j) {
    const cplx z(u(2 * (j - 1)), u(2 * (j - 1) + 1));
    const cplx w(u(2 * (n - 1) + 2 * (j - 1)), u(2 * (n - 1) + 2 * (j - 1) + 1));
    p(j) = z;
    p(n + j) = w;
    pair += z * w;
    b += std::norm(w) - std::norm(z);
  }
  const double sq = 0.5 * (b + std::sqrt(b * b + 4.0 * std::norm(pair)));
  if (!(sq > 1e-14)) throw DomainError("calabi chart: point outside the slice z1 > 0");
  const double z1 = std::sqrt(sq);
  p(0) = z1;
  p(n) = -pair / z1;
  return p;
}

inline Eigen::VectorXcd solve_level_set(const GroupActionSpec& s, const Eigen::VectorXd& u) {
  return representative(s, u);
}

/// Orthogonal projector onto span{Y, I Y, J Y, K Y}^perp, the horizontal space.
inline Eigen::MatrixXd horizontal_projector(const GroupActionSpec& s, const Eigen::VectorXcd& p) {
  const FlatQuaternionicSpace q = s.space();
  const Eigen::VectorXd y = to_real(s.generator(p));
  const double y2 = y.squaredNorm();
  if (!(y2 > 1e-20)) throw DomainError("horizontal projection degenerate: generator vanishes");
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(q.real_dim(), q.real_dim()) - y * y.transpose() / y2;
  for (int a = 1; a <= 3; ++a) {
    const Eigen::VectorXd v = q.structure(a) * y;
    P -= v * v.transpose() / y2;
  }
  return P;
}

/// Chart data at u: representative, coordinate tangents, projector and horizontal lifts.
struct QuotientChart {
  Eigen::VectorXd u;
  Eigen::VectorXcd point;
  Eigen::MatrixXd tangents;
  Eigen::MatrixXd projector;
  Eigen::MatrixXd lifts;
};

inline QuotientChart chart(const GroupActionSpec& s, const Eigen::VectorXd& u, double h = 1e-4) {
  QuotientChart c;
  c.u = u;
  c.point = representative(s, u);
  c.tangents = numeric::jacobian([&](const Eigen::VectorXd& v) { return to_real(representative(s, v)); }, u, h);
  c.projector = horizontal_projector(s, c.point);
  c.lifts = c.projector * c.tangents;
  return c;
}

inline Eigen::MatrixXd quotient_metric(const QuotientChart& c) { return c.lifts.transpose() * c.lifts; }
inline Eigen::MatrixXd quotient_metric(const GroupActionSpec& s, const Eigen::VectorXd& u) {
  return quotient_metric(chart(s, u));
}

inline std::array<Eigen::MatrixXd, 3> quotient_kahler_matrices(const GroupActionSpec& s, const QuotientChart& c) {
  const FlatQuaternionicSpace q = s.space();
  std::array<Eigen::MatrixXd, 3> out;
  for (int a = 1; a <= 3; ++a) out[a - 1] = c.lifts.transpose() * q.omega(a) * c.lifts;
  return out;
}

inline std::array<FormVector, 3> quotient_kahler_forms(const GroupActionSpec& s, const Eigen::VectorXd& u) {
  const auto m = quotient_kahler_matrices(s, chart(s, u));
  return {FormVector::two_form(m[0]), FormVector::two_form(m[1]), FormVector::two_form(m[2])};
}

inline FormVector quotient_kahler_form(const GroupActionSpec& s, const Eigen::VectorXd& u, int a) {
  if (a < 1 || a > 3) throw DomainError("Kahler form index must be 1, 2 or 3");
  return quotient_kahler_forms(s, u)[a - 1];
}

struct ProjectorCheck {
  double idempotent = 0.0;
  double symmetric = 0.0;
  double orbit = 0.0;
  double moment = 0.0;

  double max() const { return std::max({idempotent, symmetric, orbit, moment}); }
};

inline ProjectorCheck check_projector(const GroupActionSpec& s, const Eigen::VectorXcd& p) {
  const Eigen::MatrixXd P = horizontal_projector(s, p);
  const Eigen::VectorXd y = to_real(s.generator(p));
  return {(P * P - P).cwiseAbs().maxCoeff(), (P - P.transpose()).cwiseAbs().maxCoeff(),
          (P * y).cwiseAbs().maxCoeff(), (moment_differential(s, p) * P).cwiseAbs().maxCoeff()};
}

/// max coefficient of d omega_a over a = 1, 2, 3 by finite differences.
inline double closedness_residual(const GroupActionSpec& s, const Eigen::VectorXd& u, double h = 1e-3) {
  double r = 0.0;
  for (int a = 1; a <= 3; ++a) {
    auto field = [&](const Eigen::VectorXd& v) { return quotient_kahler_form(s, v, a); };
    r = std::max(r, ext::exterior_derivative(field, u, h).max_abs());
  }
  return r;
}

/// Complex structures I_a = -G^{-1} omega_a reconstructed on the chart; returns
/// the largest defect of I_a^2 = -1 and I_1 I_2 = I_3 (cyclic).
inline double quaternion_residual(const GroupActionSpec& s, const Eigen::VectorXd& u) {
  const QuotientChart c = chart(s, u);
  const Eigen::MatrixXd G = quotient_metric(c);
  const auto om = quotient_kahler_matrices(s, c);
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
  std::array<Eigen::MatrixXd, 3> I;
  for (int a = 0; a < 3; ++a) I[a] = -ldlt.solve(om[a]);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(G.rows(), G.cols());
  double r = 0.0;
  for (int a = 0; a < 3; ++a) {
    r = std::max(r, (I[a] * I[a] + id).cwiseAbs().maxCoeff());
    r = std::max(r, (I[a] * I[(a + 1) % 3] - I[(a + 2) % 3]).cwiseAbs().maxCoeff());
  }
  return r;
}

// ---------------------------------------------------------------------------
// fields on the quotient

/// w -> e^{-i theta} w; with this orientation L_X omega_2 = omega_3.
inline Eigen::VectorXcd rotating_ambient(const GroupActionSpec& s, const Eigen::VectorXcd& p) {
  s.check(p);
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(p.size());
  x.tail(s.n) = cplx(0.0, -1.0) * p.tail(s.n);
  return x;
}

/// (e^{i theta} z1, e^{-i theta} w1) on the Taub-NUT model.
inline Eigen::VectorXcd triholomorphic_ambient(const GroupActionSpec& s, const Eigen::VectorXcd& p) {
  if (s.model != Model::taubnut) throw DomainError("triholomorphic circle is defined for the taubnut model");
  s.check(p);
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(p.size());
  x(0) = cplx(0.0, 1.0) * p(0);
  x(2) = cplx(0.0, -1.0) * p(2);
  return x;
}

/// Chart components of the pushed-down field: lifts * xi = P X.
inline Eigen::VectorXd chart_field(const QuotientChart& c, const Eigen::VectorXd& ambient) {
  const Eigen::VectorXd h = c.projector * ambient;
  return (c.lifts.transpose() * c.lifts).ldlt().solve(c.lifts.transpose() * h);
}

inline Eigen::VectorXd rotating_field(const GroupActionSpec& s, const Eigen::VectorXd& u) {
  const QuotientChart c = chart(s, u);
  return chart_field(c, to_real(rotating_ambient(s, c.point)));
}

/// L_X omega_a = d i(X) omega_a + i(X) d omega_a, by finite differences.
inline FormVector lie_derivative(const GroupActionSpec& s, const AmbientField& field, const Eigen::VectorXd& u,
                                 int a, double h = 1e-3) {
  auto contracted = [&](const Eigen::VectorXd& v) {
    const QuotientChart c = chart(s, v);
    const Eigen::VectorXd xi = chart_field(c, to_real(field(c.point)));
    return ext::interior(xi, FormVector::two_form(quotient_kahler_matrices(s, c)[a - 1]));
  };
  auto form = [&](const Eigen::VectorXd& v) { return quotient_kahler_form(s, v, a); };
  const QuotientChart c = chart(s, u);
  const Eigen::VectorXd xi = chart_field(c, to_real(field(c.point)));
  return ext::exterior_derivative(contracted, u, h) + ext::interior(xi, ext::exterior_derivative(form, u, h));
}

struct OmegasResidual {
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;
  double dbeta = 0.0;

  double max() const { return std::max({l1, l2, l3, dbeta}); }
};

/// Residuals of L_X omega_1 = 0, L_X omega_2 = omega_3, L_X omega_3 = -omega_2 and
/// d(i(X) omega_2) = omega_3 for the rotating field.
inline OmegasResidual omegas_residual(const GroupActionSpec& s, const Eigen::VectorXd& u, double h = 1e-3) {
  const AmbientField x = [&](const Eigen::VectorXcd& p) { return rotating_ambient(s, p); };
  const auto om = quotient_kahler_forms(s, u);
  OmegasResidual r;
  r.l1 = lie_derivative(s, x, u, 1, h).max_abs();
  r.l2 = (lie_derivative(s, x, u, 2, h) - om[2]).max_abs();
  r.l3 = (lie_derivative(s, x, u, 3, h) + om[1]).max_abs();
  auto beta = [&](const Eigen::VectorXd& v) {
    const QuotientChart c = chart(s, v);
    const Eigen::VectorXd xi = chart_field(c, to_real(rotating_ambient(s, c.point)));
    return ext::interior(xi, FormVector::two_form(quotient_kahler_matrices(s, c)[1]));
  };
  r.dbeta = (ext::exterior_derivative(beta, u, h) - om[2]).max_abs();
  return r;
}

/// max over a of |L_T omega_a| for the triholomorphic Taub-NUT circle.
inline double triholomorphic_residual(const GroupActionSpec& s, const Eigen::VectorXd& u, double h = 1e-3) {
  const AmbientField t = [&](const Eigen::VectorXcd& p) { return triholomorphic_ambient(s, p); };
  double r = 0.0;
  for (int a = 1; a <= 3; ++a) r = std::max(r, lie_derivative(s, t, u, a, h).max_abs());
  return r;
}

// ---------------------------------------------------------------------------
// linear growth

struct GrowthSample {
  double distance = 0.0;
  double ambient = 0.0;
  double horizontal = 0.0;
  double quotient = 0.0;
};

struct GrowthResult {
  std::vector<GrowthSample> samples;
  double c1 = 0.0;
  double c0 = 0.0;
  double ambient_c1 = 0.0;
  double linear_norm = 0.0;
  int violations = 0;
};

/// Top singular value of the real-linear part of an ambient affine field.
inline double linear_part_norm(const AmbientField& field, const Eigen::VectorXcd& p) {
  const Eigen::MatrixXd a =
      numeric::jacobian([&](const Eigen::VectorXd& x) { return to_real(field(to_complex(x))); }, to_real(p), 1e-3);
  return Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0);
}

/// Fits ||Ybar|| <= c1 ||x - x0|| + c0 with c0 = ||Y(x0)|| given, c1 the least
/// constant without violations; ||x - x0|| is the lower bound for the quotient
/// distance. Counts breaches of ||Ybar|| <= ||Y_H|| <= ||Y||.
inline GrowthResult growth_check(const GroupActionSpec& s, const AmbientField& field, const Eigen::VectorXd& u0,
                                 const std::vector<Eigen::VectorXd>& samples) {
  GrowthResult g;
  const Eigen::VectorXcd p0 = representative(s, u0);
  const Eigen::VectorXd x0 = to_real(p0);
  g.c0 = to_real(field(p0)).norm();
  g.linear_norm = linear_part_norm(field, p0);
  for (const auto& u : samples) {
    const QuotientChart c = chart(s, u);
    const Eigen::VectorXd y = to_real(field(c.point));
    const Eigen::VectorXd xi = chart_field(c, y);
    GrowthSample smp;
    smp.distance = (to_real(c.point) - x0).norm();
    smp.ambient = y.norm();
    smp.horizontal = (c.projector * y).norm();
    smp.quotient = std::sqrt(std::max(0.0, xi.dot(quotient_metric(c) * xi)));
    const double slack = 1e-10 * std::max(1.0, smp.ambient);
    if (smp.quotient > smp.horizontal + slack || smp.horizontal > smp.ambient + slack) ++g.violations;
    if (smp.distance > 0.0) {
      g.c1 = std::max(g.c1, (smp.quotient - g.c0) / smp.distance);
      g.ambient_c1 = std::max(g.ambient_c1, (smp.ambient - g.c0) / smp.distance);
    }
    g.samples.push_back(smp);
  }
  return g;
}

/// Chart points t * direction for t on a geometric grid.
inline std::vector<Eigen::VectorXd> radial_samples(const Eigen::VectorXd& direction, double t0, double t1, int count) {
  std::vector<Eigen::VectorXd> out;
  for (double t : numeric::geomspace(t0, t1, count)) out.push_back(t * direction.normalized());
  return out;
}

// ---------------------------------------------------------------------------
// Calabi n = 2 against the Eguchi-Hanson profile

struct EguchiHansonComparison {
  double s = 0.0;
  double r = 0.0;
  Eigen::Matrix2d calabi;
  Eigen::Matrix2d profile;
  double rel_err = 0.0;
};

/// At the chart point w2 = s (z2 = 0) compares the quotient metric on the plane
/// (d Re w2, d Im w2) with the eguchi_hanson_profile(1/2) metric on
/// (dr/ds d_r, d_psi / s) under r^2 = 1/4 + s^2/2; the radial entry carries the
/// factor 4 between the two normalisations.
inline EguchiHansonComparison compare_eguchi_hanson(double s) {
  if (!(s > 0.0)) throw DomainError("compare_eguchi_hanson: s must be positive");
  const GroupActionSpec spec = GroupActionSpec::calabi(2, 0.5);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(4);
  u(2) = s;
  const Eigen::MatrixXd G = quotient_metric(spec, u);
  EguchiHansonComparison c;
  c.s = s;
  c.calabi = G.bottomRightCorner<2, 2>();
  const auto eh = bianchi::eguchi_hanson_profile(0.5);
  c.r = std::sqrt(0.25 + 0.5 * s * s);
  const bianchi::Coefficients k = eh.at_offset(0.5 * s * s / (c.r + 0.5));
  const double drds = s / (2.0 * c.r);
  c.profile << 4.0 * k.f * k.f * drds * drds, 0.0, 0.0, k.c * k.c / (s * s);
  c.rel_err = (c.calabi - c.profile).cwiseAbs().maxCoeff() / c.profile.cwiseAbs().maxCoeff();
  return c;
}

} // namespace hkl2::hk
