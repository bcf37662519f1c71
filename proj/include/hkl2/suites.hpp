#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hkl2/cohomogeneity_one.hpp"
#include "hkl2/exterior_algebra.hpp"
#include "hkl2/gibbons_hawking.hpp"
#include "hkl2/hk_quotient.hpp"
#include "hkl2/nahm.hpp"
#include "hkl2/report.hpp"

// Verification suites. Each suite turns module checks into report records;
// the same seed and configuration always give the same records.

namespace hkl2::suites {

using report::Recorder;
using report::Source;

struct SuiteConfig {
  std::uint64_t seed = 7;
  double tol_scale = 1.0;
  int gh_points = 100;
  int chart_points = 200;
  int fd_points = 8;
  int nahm_nodes = 2001;
  bool two_pole = true;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"algebra", "taubnut", "bianchi", "quotient", "nahm"};
  return names;
}

/// Expands "all" and validates names; throws DomainError for unknown suites.
inline std::vector<std::string> resolve(const std::string& name) {
  if (name == "all") return suite_names();
  const auto& n = suite_names();
  if (std::find(n.begin(), n.end(), name) == n.end()) throw DomainError("unknown suite '" + name + "'");
  return {name};
}

inline std::mt19937_64 suite_rng(const SuiteConfig& cfg, const std::string& suite) {
  const auto& n = suite_names();
  const auto idx = static_cast<std::uint64_t>(std::find(n.begin(), n.end(), suite) - n.begin());
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(idx)};
  return std::mt19937_64(seq);
}

// ---------------------------------------------------------------------------
// algebra

namespace detail {

/// Joint kernel of all L_i and Lambda_i in the middle degree by direct
/// wedge products: ker L_i and orthogonality to im L_i from two degrees
/// below, ranked with a full-pivot LU.
inline int brute_force_kernel_dimension(const ext::QuaternionicStructure& q) {
  using namespace ext;
  const int n = q.dim(), mid = n / 2;
  const int cols = degree_size(n, mid), below = degree_size(n, mid - 2);
  Eigen::MatrixXcd rows(3 * ((Eigen::Index{1} << n) + below), cols);
  rows.setZero();
  Eigen::Index r = 0;
  for (int a = 1; a <= 3; ++a) {
    const FormVector w = q.kahler_form(axis_from_int(a));
    for (int c = 0; c < cols; ++c) {
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(cols);
      e(c) = 1.0;
      rows.block(r, c, Eigen::Index{1} << n, 1) = wedge(w, FormVector::from_block(n, mid, e)).dense();
    }
    r += Eigen::Index{1} << n;
    for (int c = 0; c < below; ++c) {
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(below);
      e(c) = 1.0;
      rows.row(r + c) = wedge(w, FormVector::from_block(n, mid - 2, e)).block(mid).adjoint();
    }
    r += below;
  }
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(rows);
  lu.setThreshold(1e-10);
  return cols - static_cast<int>(lu.rank());
}

} // namespace detail

inline std::vector<report::Record> algebra_suite(const SuiteConfig& cfg) {
  using namespace ext;
  Recorder rec("algebra", cfg.tol_scale);
  auto rng = suite_rng(cfg, "algebra");
  for (int k : {1, 2}) {
    const QuaternionicStructure q = QuaternionicStructure::standard(k);
    const LefschetzAlgebra alg(q);
    const std::string tag = "k" + std::to_string(k);
    const So5Report rep = verify_so5(alg);
    rec.at_most("so5_residual_" + tag, "so5-relations", Source::identity, rep.max_so5, 1e-12);
    rec.at_most("grading_residual_" + tag, "sl2-grading", Source::identity, rep.max_grading, 1e-12);
    rec.at_most("su2_residual_" + tag, "su2-bracket", Source::identity, rep.max_su2, 1e-12);
    rec.at_most("lefschetz_commute_" + tag, "lefschetz-commute", Source::identity, rep.max_commuting, 1e-12);
    rec.equal("so5_relation_count_" + tag, "so5-relations", Source::plumbing, static_cast<double>(rep.so5.size()),
              6.0 * (4 * k + 1));

    const auto ker = middle_kernel(alg);
    rec.equal("kernel_dim_" + tag, "middle-kernel", Source::oracle, static_cast<double>(ker.size()),
              detail::brute_force_kernel_dimension(q));
    double sigma = 0.0, duality = 0.0, primitive = 0.0;
    int wrong_type = 0;
    const double sign = k == 1 ? -1.0 : 1.0;
    for (const auto& eta : ker) {
      duality = std::max(duality, (hodge_star(eta, q) - sign * eta).max_abs());
      for (int a = 1; a <= 3; ++a) {
        const Axis x = axis_from_int(a);
        sigma = std::max(sigma, alg.sigma(x)(eta).max_abs());
        primitive = std::max(primitive, alg.Lambda(x)(eta).max_abs());
        if (k == 1) {
          const auto comps = type_components(eta, x, q);
          if (comps.size() != 1 || comps[0].p != 1 || comps[0].q != 1) ++wrong_type;
        }
      }
    }
    rec.at_most("kernel_duality_" + tag, k == 1 ? "anti-self-dual" : "self-dual", Source::identity, duality, 1e-12);
    rec.at_most("kernel_sigma_" + tag, "middle-kernel", Source::identity, sigma, 1e-12);
    rec.at_most("kernel_primitive_" + tag, "primitive", Source::identity, primitive, 1e-12);
    if (k == 1) {
      rec.equal("kernel_dim_k1_value", "middle-kernel", Source::reference_value, static_cast<double>(ker.size()), 3.0);
      const Eigen::MatrixXd asd = duality_eigenbasis(q.metric(), -1);
      rec.at_most("kernel_asd_distance_k1", "anti-self-dual", Source::oracle,
                  numeric::subspace_distance(stack_blocks(ker, 2), Eigen::MatrixXcd(asd.cast<cplx>())), 1e-10);
      rec.equal("kernel_type_11_failures_k1", "type-decomposition", Source::identity, wrong_type, 0.0);
    }
  }

  const QuaternionicStructure q1 = QuaternionicStructure::standard(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double completeness = 0.0;
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXcd block(degree_size(4, 2));
    for (auto& c : block) c = {u(rng), u(rng)};
    const FormVector a = FormVector::from_block(4, 2, block);
    for (int ax = 1; ax <= 3; ++ax) {
      FormVector sum(4);
      for (const auto& c : type_components(a, axis_from_int(ax), q1)) sum += c.form;
      completeness = std::max(completeness, (sum - a).max_abs());
    }
  }
  rec.at_most("type_completeness_random", "type-decomposition", Source::identity, completeness, 1e-12);
  return rec.take();
}

// ---------------------------------------------------------------------------
// Taub-NUT

inline std::vector<report::Record> taubnut_suite(const SuiteConfig& cfg) {
  using namespace gh;
  constexpr double pi = std::numbers::pi;
  Recorder rec("taubnut", cfg.tol_scale);
  auto rng = suite_rng(cfg, "taubnut");
  std::uniform_real_distribution<double> u(0.0, 1.0);

  double dd = 0.0, asd = 0.0;
  for (Patch patch : {Patch::north, Patch::south}) {
    const GHData d = GHData::make(1.0, -1.0, patch);
    for (int i = 0; i < cfg.gh_points / 2; ++i) {
      const double r = 0.2 * std::pow(100.0, u(rng));
      double polar = 0.85 * pi * u(rng) + 0.05 * pi;
      if (patch == Patch::south) polar = pi - polar;
      const GHPoint p = spherical_point(r, polar, 2.0 * pi * u(rng), 4.0 * pi * u(rng));
      dd = std::max(dd, ddtheta_residual(p, d));
      asd = std::max(asd, anti_self_dual_residual(p, d));
    }
  }
  rec.at_most("ddtheta_residual", "dtheta-closed", Source::identity, dd, 1e-6);
  rec.at_most("asd_residual", "dtheta-anti-self-dual", Source::identity, asd, 1e-8);

  const GHData d = GHData::make(1.0, 4.0 * pi);
  const L2Result l2 = l2_norm(d);
  rec.near("l2_norm_m1", "l2-norm", Source::reference_value, l2.value / (16.0 * pi * pi), 1.0, 1e-6);
  rec.near("l2_closed_form_m1", "l2-norm", Source::identity, l2.closed_form / (16.0 * pi * pi), 1.0, 1e-12);
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  auto f = [&](double r) { return radial_integrand(r, d); };
  const double oracle = ts.integrate(f, 0.0, 1.0) + es.integrate(f, 1.0, std::numeric_limits<double>::infinity());
  rec.near("l2_norm_quadrature_oracle", "l2-norm", Source::oracle, l2.value / oracle, 1.0, 1e-6);
  for (double m : {0.5, 2.0}) {
    const GHData dm = GHData::make(m);
    rec.near("l2_norm_scaling_m" + format_double(m), "l2-norm", Source::identity,
             l2_norm(dm).value / (4.0 * pi * m * dm.tau_period), 1.0, 1e-6);
  }

  const TailDecay tail = tail_decay(GHData::make(1.0), numeric::geomspace(1e2, 1e4, 9));
  rec.near("tail_decay_slope", "tail-decay", Source::reference_value, tail.slope, -1.0, 0.1);
  const auto radii = numeric::geomspace(1e2, 1e6, 9);
  std::vector<double> cross;
  for (double r : radii) cross.push_back(cutoff_cross_term(GHData::make(1.0), r, 2.0, 1.0, 1.0));
  rec.near("cutoff_cross_term_slope", "cutoff", Source::identity, numeric::loglog_slope(radii, cross), -0.5, 0.02);
  return rec.take();
}

// ---------------------------------------------------------------------------
// Bianchi IX

inline std::vector<report::Record> bianchi_suite(const SuiteConfig& cfg) {
  using namespace bianchi;
  constexpr double pi = std::numbers::pi;
  Recorder rec("bianchi", cfg.tol_scale);
  auto rng = suite_rng(cfg, "bianchi");

  auto same_verdicts = [](const Classification& a, const Classification& b) {
    for (int i = 0; i < 3; ++i)
      if (a.axes[i].integrable != b.axes[i].integrable || a.axes[i].divergent_at != b.axes[i].divergent_at)
        return false;
    return true;
  };
  auto only = [](const Classification& c, int axis) { return c.integrable_axes() == std::vector<int>{axis}; };

  const Classification ah = classify_l2(atiyah_hitchin_model_profile(Interpolant::smoothstep));
  rec.flag("ah_integrable_axes_{1}", "ah-classification", Source::reference_value, only(ah, 1));
  for (int axis : {2, 3}) {
    const auto& v = ah.axes[axis - 1];
    rec.flag("ah_axis" + std::to_string(axis) + "_divergent_lower", "ah-classification", Source::reference_value,
             v.divergent_at == Endpoint::lower);
    rec.near("ah_axis" + std::to_string(axis) + "_lower_exponent", "ah-pole-order", Source::reference_value,
             v.lower.fitted_exponent, -2.0, 0.05);
  }
  const Classification ah2 = classify_l2(atiyah_hitchin_model_profile(Interpolant::exp_bump));
  rec.flag("ah_second_interpolant_same_verdicts", "ah-classification", Source::identity, same_verdicts(ah, ah2));
  const Classification ahr =
      classify_l2(reparametrize(atiyah_hitchin_model_profile(Interpolant::smoothstep), quadratic_reparametrization()));
  rec.flag("ah_reparametrized_same_verdicts", "ah-classification", Source::identity, same_verdicts(ah, ahr));

  const Classification eh = classify_l2(eguchi_hanson_profile(0.5));
  rec.flag("eh_integrable_axes_{3}", "eh-classification", Source::reference_value, only(eh, 3));
  rec.near("eh_axis3_upper_exponent", "eh-classification", Source::identity, eh.axes[2].upper.fitted_exponent, -3.0,
           0.05);
  const Classification ehr = classify_l2(reparametrize(eguchi_hanson_profile(0.5), quadratic_reparametrization()));
  rec.flag("eh_reparametrized_same_verdicts", "eh-classification", Source::identity, same_verdicts(eh, ehr));

  const double m = 1.0;
  const BianchiProfile tnp = biaxial_taubnut_profile(m);
  const Classification tn = classify_l2(tnp);
  rec.flag("tn_integrable_axes_{3}", "tn-classification", Source::reference_value, only(tn, 3));

  const auto sol = solve_closedness(3, tnp);
  const gh::GHData d = gh::GHData::make(m);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double c0 = 0.0, spread = 0.0, shape = 0.0;
  for (int t = 0; t < 40; ++t) {
    const Eigen::Vector4d e(0.05 * std::pow(400.0, u(rng)), 0.1 + 2.6 * u(rng), 2 * pi * u(rng), 2 * pi * u(rng));
    const Eigen::MatrixXd jac = numeric::jacobian(
        [&](const Eigen::VectorXd& y) { return Eigen::VectorXd(euler_to_gibbons_hawking(Eigen::Vector4d(y), m)); },
        Eigen::VectorXd(e), 1e-4);
    const ext::FormVector pulled =
        ext::pullback(jac, gh::dtheta(gh::GHPoint::from_coords(euler_to_gibbons_hawking(e, m)), d));
    const ext::FormVector phi = ansatz_form(sol, e);
    Eigen::Index best = 0;
    phi.dense().cwiseAbs().maxCoeff(&best);
    const double c = (pulled.coeff(static_cast<ext::Mask>(best)) / phi.coeff(static_cast<ext::Mask>(best))).real();
    if (t == 0) c0 = c;
    spread = std::max(spread, std::abs(c / c0 - 1.0));
    shape = std::max(shape, (pulled - c * phi).max_abs() / pulled.max_abs());
  }
  rec.at_most("tn_phi3_dtheta_ratio_spread", "tn-cross-module", Source::oracle, spread, 1e-6);
  rec.at_most("tn_phi3_dtheta_shape", "tn-cross-module", Source::oracle, shape, 1e-6);
  return rec.take();
}

// ---------------------------------------------------------------------------
// hyperkaehler quotients

inline std::vector<report::Record> quotient_suite(const SuiteConfig& cfg) {
  using namespace hk;
  Recorder rec("quotient", cfg.tol_scale);
  auto rng = suite_rng(cfg, "quotient");
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto grid = [&](const GroupActionSpec& s, int count, double scale) {
    std::vector<Eigen::VectorXd> out;
    for (int k = 0; k < count; ++k) {
      Eigen::VectorXd p(s.chart_dim());
      for (auto& x : p) x = scale * u(rng);
      out.push_back(p);
    }
    return out;
  };

  for (const auto& s : {GroupActionSpec::taubnut(), GroupActionSpec::calabi(2)}) {
    const std::string tag = model_name(s.model);
    double moment = 0.0;
    for (const auto& p : grid(s, cfg.chart_points, 2.0)) moment = std::max(moment, s.moments(representative(s, p)).residual());
    rec.at_most(tag + "_moment_residual", "moment-map", Source::identity, moment, 1e-12);

    double closed = 0.0;
    OmegasResidual om;
    for (const auto& p : grid(s, cfg.fd_points, 1.5)) {
      closed = std::max(closed, closedness_residual(s, p));
      const OmegasResidual r = omegas_residual(s, p);
      om.l1 = std::max(om.l1, r.l1);
      om.l2 = std::max(om.l2, r.l2);
      om.l3 = std::max(om.l3, r.l3);
      om.dbeta = std::max(om.dbeta, r.dbeta);
    }
    rec.at_most(tag + "_domega_residual", "kahler-closed", Source::identity, closed, 1e-5);
    rec.at_most(tag + "_lie_omega1_residual", "rotation-omegas", Source::identity, om.l1, 1e-5);
    rec.at_most(tag + "_lie_omega2_residual", "rotation-omegas", Source::identity, om.l2, 1e-5);
    rec.at_most(tag + "_lie_omega3_residual", "rotation-omegas", Source::identity, om.l3, 1e-5);
    rec.at_most(tag + "_dbeta_residual", "rotation-omegas", Source::identity, om.dbeta, 1e-5);

    const AmbientField x = [&](const Eigen::VectorXcd& p) { return rotating_ambient(s, p); };
    // c1 is a supremum over directions: probe the w-block axes, along which
    // the rotating field is largest, and a few seeded random directions.
    std::vector<Eigen::VectorXd> dirs;
    for (int k = s.chart_dim() / 2; k < s.chart_dim(); ++k) dirs.push_back(Eigen::VectorXd::Unit(s.chart_dim(), k));
    for (int k = 0; k < 3; ++k) {
      Eigen::VectorXd dir(s.chart_dim());
      for (auto& c : dir) c = u(rng);
      dirs.push_back(dir);
    }
    std::vector<Eigen::VectorXd> samples;
    for (const auto& dir : dirs)
      for (const auto& p : radial_samples(dir, 1e-3, 30.0, 25)) samples.push_back(p);
    const GrowthResult g = growth_check(s, x, Eigen::VectorXd::Zero(s.chart_dim()), samples);
    rec.equal(tag + "_growth_violations", "linear-growth", Source::identity, g.violations, 0.0);
    rec.near(tag + "_growth_c1_vs_affine_norm", "linear-growth", Source::oracle,
             g.c1 / g.linear_norm, 1.0, 0.05);
    rec.at_most(tag + "_growth_c1_minus_ambient", "linear-growth", Source::identity, g.c1 - g.ambient_c1, 1e-12);
  }

  double eh = 0.0;
  for (double s : {0.05, 0.3, 1.0, 2.5, 8.0}) eh = std::max(eh, compare_eguchi_hanson(s).rel_err);
  rec.at_most("calabi_eguchi_hanson_metric", "calabi-eh", Source::oracle, eh, 1e-4);
  return rec.take();
}

// ---------------------------------------------------------------------------
// Nahm

inline std::vector<report::Record> nahm_suite(const SuiteConfig& cfg) {
  using namespace nahm;
  Recorder rec("nahm", cfg.tol_scale);
  auto rng = suite_rng(cfg, "nahm");
  const cplx i1(0.0, 1.0);

  const ResidueTriple rho = standard_residues();
  rec.at_most("residue_bracket", "residues", Source::identity, rho.bracket_residual(), 0.0);
  rec.at_most("residue_trace", "residues", Source::identity, rho.trace_residual(), 0.0);
  rec.equal("residue_commutant_dim", "residues", Source::identity, rho.commutant_dimension(), 1.0);

  rec.at_most("one_pole_residual", "nahm-residual", Source::identity, nahm_residual(one_pole_solution(0.1, 1.0, 2000)),
              1e-8);

  std::normal_distribution<double> nd;
  const Mat z = i1 * (nd(rng) * pauli(1) + nd(rng) * pauli(2) + nd(rng) * pauli(3));
  const NahmState mid = one_pole_solution(0.5, 1.5, cfg.nahm_nodes);
  const NahmState moved = gauge_transform(mid, bump_gauge(z, 0.5, 1.5, 1.0));
  rec.at_most("gauge_residual_change", "gauge-invariance", Source::identity,
              std::abs(nahm_residual(moved) - nahm_residual(mid)), 1e-8);
  double traces = 0.0;
  for (int n = 0; n < mid.grid().n; n += 20)
    for (int a = 1; a <= 3; ++a)
      for (int b = 1; b <= 3; ++b)
        traces = std::max(traces, std::abs(trace_product(moved.B.m[a][n], moved.B.m[b][n]) -
                                           trace_product(mid.B.m[a][n], mid.B.m[b][n])));
  rec.at_most("gauge_trace_change", "gauge-invariance", Source::identity, traces, 1e-8);

  const ContractionResult one = run(one_pole_scenario(1e-3, cfg.nahm_nodes));
  rec.at_most("contraction_rel_err_eps1e-3", "contraction", Source::identity, one.rel_err, 1e-4);

  std::vector<double> hs, herr;
  for (int n : {51, 101, 201, 401}) {
    const ContractionResult r = run(one_pole_scenario(1e-2, n));
    hs.push_back(r.h);
    herr.push_back(r.rel_err);
  }
  double h_order = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < hs.size(); ++k)
    h_order = std::min(h_order, std::log(herr[k - 1] / herr[k]) / std::log(hs[k - 1] / hs[k]));
  rec.at_least("contraction_h_order", "contraction-sweep", Source::identity, h_order, 2.0);

  if (cfg.two_pole) {
    std::vector<double> eps{1e-2, 5e-3, 2.5e-3, 1.25e-3}, eerr;
    for (double e : eps) eerr.push_back(run(two_pole_scenario(0.5, e, cfg.nahm_nodes)).limit_err);
    double e_order = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < eps.size(); ++k)
      e_order = std::min(e_order, std::log(eerr[k - 1] / eerr[k]) / std::log(eps[k - 1] / eps[k]));
    rec.at_least("contraction_eps_order", "contraction-sweep", Source::identity, e_order, 1.0);
    rec.at_most("contraction_limit_err_eps1.25e-3", "contraction-sweep", Source::identity, eerr.back(), 1e-3);
    rec.at_most("two_pole_residual", "nahm-residual", Source::identity,
                nahm_residual(two_pole_solution(0.5, 5e-2, cfg.nahm_nodes)), 1e-6);
  }

  const Scenario sc = two_pole_scenario(0.5, 1e-3, 801);
  const Eigen::Vector3d x(nd(rng), nd(rng), nd(rng));
  const ContractionResult tr = contraction_identity(sc.state, translation_tangent(sc.state.grid(), 2, x), sc.psi);
  rec.equal("translation_rhs", "translation", Source::identity, tr.rhs, 0.0);
  rec.at_most("translation_lhs_minus_boundary", "translation", Source::identity, std::abs(tr.lhs - tr.boundary), 1e-10);
  rec.at_most("translation_linearized_residual", "translation", Source::identity, tr.tangent_residual, 0.0);
  rec.at_most("translation_action_residual_change", "translation", Source::identity,
              std::abs(nahm_residual(translation_action(sc.state, x)) - nahm_residual(sc.state)), 1e-10);
  return rec.take();
}

// ---------------------------------------------------------------------------

inline std::vector<report::Record> run_one(const std::string& name, const SuiteConfig& cfg) {
  using Fn = std::vector<report::Record> (*)(const SuiteConfig&);
  static const std::vector<std::pair<std::string, Fn>> table{{"algebra", algebra_suite},
                                                             {"taubnut", taubnut_suite},
                                                             {"bianchi", bianchi_suite},
                                                             {"quotient", quotient_suite},
                                                             {"nahm", nahm_suite}};
  for (const auto& [n, fn] : table) {
    if (n != name) continue;
    try {
      return fn(cfg);
    } catch (const Error& e) {
      Recorder rec(name, cfg.tol_scale);
      rec.flag(std::string("completed: ") + e.what(), "plumbing", Source::plumbing, false);
      return rec.take();
    }
  }
  throw DomainError("unknown suite '" + name + "'");
}

/// Runs the named suite ("all" for every suite) with suites in parallel and
/// records merged in the fixed suite order.
inline std::vector<report::Record> run_suite(const std::string& name, const SuiteConfig& cfg) {
  const auto names = resolve(name);
  std::vector<std::future<std::vector<report::Record>>> jobs;
  for (const auto& n : names) jobs.push_back(std::async(std::launch::async, run_one, n, cfg));
  std::vector<report::Record> out;
  for (auto& j : jobs) {
    auto rs = j.get();
    out.insert(out.end(), rs.begin(), rs.end());
  }
  return out;
}

} // namespace hkl2::suites
