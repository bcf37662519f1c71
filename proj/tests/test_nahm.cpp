#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "hkl2/nahm.hpp"

using namespace hkl2;
using namespace hkl2::nahm;

namespace {

const cplx I1(0.0, 1.0);

MatrixPath constant_path(const Mat& m) {
  const Mat zero = Mat::Zero(m.rows(), m.cols());
  return {[=](double) { return m; }, [=](double) { return zero; }};
}

TangentState difference(const NahmState& p, const NahmState& m, double scale) {
  TangentState t;
  t.A.grid = p.grid();
  for (int a = 0; a < 4; ++a) {
    t.A.m[a].resize(p.grid().n);
    for (int n = 0; n < p.grid().n; ++n) t.A.m[a][n] = (p.B.m[a][n] - m.B.m[a][n]) / scale;
  }
  return t;
}

TangentState zero_tangent(const Grid& g, int k) {
  TangentState t;
  t.A = sample(g, [k](double) { return Quadruple{Mat::Zero(k, k), Mat::Zero(k, k), Mat::Zero(k, k), Mat::Zero(k, k)}; });
  return t;
}

MatrixPath moderate_gauge(double lo, double hi, double amp) {
  return bump_gauge(Mat(I1 * (0.6 * pauli(1) - 0.3 * pauli(2) + 0.5 * pauli(3))), lo, hi, amp);
}

double order(double coarse, double fine) { return std::log2(coarse / fine); }

} // namespace

TEST(Residues, BracketRelationsAndTrace) {
  const ResidueTriple r = standard_residues();
  EXPECT_EQ(r.k, 2);
  EXPECT_EQ(r.bracket_residual(), 0.0);
  EXPECT_EQ(r.trace_residual(), 0.0);
  for (int a = 1; a <= 3; ++a) EXPECT_LT(max_norm(r[a] - 0.5 * I1 * pauli(a)), 1e-16);
}

TEST(Residues, IrreducibleAndAntiHermitian) {
  for (int k : {2, 3, 4}) {
    const ResidueTriple r = standard_residues(k);
    EXPECT_EQ(r.commutant_dimension(), 1) << k;
    EXPECT_LT(r.bracket_residual(), 1e-14) << k;
    for (int a = 1; a <= 3; ++a) EXPECT_LT(max_norm(r[a] + r[a].adjoint()), 1e-16);
  }
  EXPECT_THROW(standard_residues(1), DomainError);
}

TEST(Residues, ReducibleTripleHasLargerCommutant) {
  ResidueTriple r;
  r.k = 2;
  for (auto& m : r.rho) m = Mat::Zero(2, 2);
  r.rho[2] = I1 * pauli(3);
  EXPECT_EQ(r.commutant_dimension(), 2);
}

TEST(NahmResidual, OnePoleExactSolution) {
  const NahmState st = one_pole_solution(0.1, 1.0, 2000);
  EXPECT_LE(nahm_residual(st), 1e-8);
}

TEST(NahmResidual, CommutingDiagonalIsZero) {
  const Grid g = Grid::make(0.0, 1.0, 21);
  NahmState st;
  st.rho = standard_residues();
  st.B = sample(g, [](double) {
    Mat d1 = Mat::Zero(2, 2), d2 = Mat::Zero(2, 2), d3 = Mat::Zero(2, 2);
    d1.diagonal() << I1 * 0.3, -I1 * 1.1;
    d2.diagonal() << I1 * 2.0, I1 * 0.5;
    d3.diagonal() << -I1 * 0.7, I1 * 0.2;
    return Quadruple{Mat::Zero(2, 2), d1, d2, d3};
  });
  EXPECT_EQ(nahm_residual(st), 0.0);
}

TEST(NahmResidual, DetectsPerturbation) {
  NahmState st = one_pole_solution(0.5, 1.5, 201);
  for (auto& m : st.B.m[1]) m += 1e-3 * I1 * pauli(1);
  const double r = nahm_residual(st);
  EXPECT_GT(r, 1e-4);
  EXPECT_LT(r, 1e-2);
}

TEST(NahmResidual, GridTooCoarse) {
  EXPECT_THROW(Grid::make(0.0, 1.0, 2), DomainError);
  EXPECT_THROW(nahm_residual(one_pole_solution(0.5, 1.0, 5)), DomainError);
}

TEST(NahmResidual, PoleAnsatzDominatesNearThePole) {
  const NahmState st = two_pole_solution(0.5, 1e-3, 2001);
  const ResidueTriple& rho = st.rho;
  for (int n : {0, 1, 2}) {
    const double s = st.grid().s(n);
    for (int a = 1; a <= 3; ++a) EXPECT_LT(max_norm(st.B.m[a][n] - rho[a] / s), 2.0);
  }
}

TEST(ReferenceSolutions, AxialAndEllipticProfilesSolveTheEquations) {
  for (double mu : {-0.5, 0.0, 0.7}) {
    const NahmState st = euler_top_state(Grid::make(0.2, 1.2, 1001), axial_profile(mu), standard_residues(), 0.2);
    EXPECT_LT(nahm_residual(st), 1e-8) << mu;
  }
  for (double k : {0.0, 0.3, 0.5, 0.8}) EXPECT_LT(nahm_residual(two_pole_solution(k, 0.05, 2001)), 1e-6) << k;
  EXPECT_THROW(elliptic_profile(1.0), DomainError);
}

TEST(ReferenceSolutions, EllipticProfileReflectsAboutTheMidpoint) {
  const EulerTop f = elliptic_profile(0.6);
  for (double s : {0.1, 0.45, 0.7, 0.999}) {
    const auto a = f(s), b = f(2.0 - s);
    EXPECT_NEAR(a[0], -b[0], 1e-12 * std::abs(a[0]) + 1e-14);
    EXPECT_NEAR(a[1], b[1], 1e-12 * a[1]);
    EXPECT_NEAR(a[2], b[2], 1e-12 * a[2]);
  }
  const auto mid = f(1.0);
  EXPECT_NEAR(mid[0], 0.0, 1e-15);
  EXPECT_NEAR(mid[1], boost::math::ellint_1(0.6) * 0.8, 1e-13);
}

TEST(Gauge, IdentityLeavesStateUnchanged) {
  const NahmState st = one_pole_solution(0.5, 1.5, 101);
  const NahmState out = gauge_transform(st, constant_path(Mat::Identity(2, 2)));
  for (int a = 0; a < 4; ++a)
    for (int n = 0; n < st.grid().n; ++n) EXPECT_EQ(max_norm(out.B.m[a][n] - st.B.m[a][n]), 0.0);
}

TEST(Gauge, ResidualAndTracesInvariant) {
  const NahmState st = one_pole_solution(0.5, 1.5, 2001);
  const NahmState out = gauge_transform(st, moderate_gauge(0.5, 1.5, 1.3));
  EXPECT_LE(std::abs(nahm_residual(out) - nahm_residual(st)), 1e-8);
  double worst = 0.0;
  for (int n = 0; n < st.grid().n; n += 50)
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j)
        worst = std::max(worst, std::abs(trace_product(out.B.m[i][n], out.B.m[j][n]) -
                                         trace_product(st.B.m[i][n], st.B.m[j][n])));
  EXPECT_LT(worst, 1e-12);
}

TEST(Gauge, RejectsNonUnitaryAndBadEnds) {
  const NahmState st = one_pole_solution(0.5, 1.5, 51);
  const Mat id = Mat::Identity(2, 2);
  const MatrixPath stretch{[=](double s) { return Mat(id + (s - 0.5) * (1.5 - s) * pauli(3)); },
                           [=](double s) { return Mat((2.0 - 2.0 * s) * pauli(3)); }};
  EXPECT_THROW(gauge_transform(st, stretch), DomainError);
  EXPECT_THROW(gauge_transform(st, constant_path(Mat(I1 * pauli(3)))), DomainError);
}

TEST(Tangents, TranslationIsExact) {
  const NahmState st = two_pole_solution(0.4, 0.1, 401);
  const TangentState t = translation_tangent(st.grid(), 2, Eigen::Vector3d(0.3, -1.2, 0.8));
  EXPECT_EQ(linearized_residual(t, st), 0.0);
  EXPECT_EQ(linearized_residual(zero_tangent(st.grid(), 2), st), 0.0);
}

TEST(Tangents, GaugeOrbitDifferenceIsFirstOrder) {
  const NahmState st = one_pole_solution(0.5, 1.5, 1001);
  auto residual = [&](double lambda) {
    return linearized_residual(difference(gauge_transform(st, moderate_gauge(0.5, 1.5, lambda)), st, lambda), st);
  };
  const double r1 = residual(1e-2), r2 = residual(5e-3);
  EXPECT_GT(r1, 1e-6);
  EXPECT_NEAR(order(r1, r2), 1.0, 0.1);
}

TEST(Tangents, GridMismatchThrows) {
  const NahmState st = one_pole_solution(0.5, 1.5, 101);
  EXPECT_THROW(linearized_residual(zero_tangent(Grid::make(0.5, 1.5, 103), 2), st), DimensionMismatch);
}

TEST(SymplecticForm, Antisymmetry) {
  const Scenario sc = two_pole_scenario(0.5, 0.05, 401, 1e-4);
  const TangentState x = rotation_field(sc.state, sc.psi);
  EXPECT_NEAR(symplectic_form(sc.tangent, sc.tangent), 0.0, 1e-14);
  const double a = symplectic_form(sc.tangent, x), b = symplectic_form(x, sc.tangent);
  EXPECT_NEAR(a, -b, 1e-12 * std::abs(a));
}

TEST(SymplecticForm, Bilinearity) {
  const Scenario sc = two_pole_scenario(0.5, 0.05, 401, 1e-4);
  const TangentState x = rotation_field(sc.state, sc.psi);
  const TangentState t = translation_tangent(sc.state.grid(), 2, Eigen::Vector3d(1.0, 2.0, -0.5));
  TangentState sum = sc.tangent;
  for (int a = 0; a < 4; ++a)
    for (int n = 0; n < sum.grid().n; ++n) sum.A.m[a][n] = 2.0 * sc.tangent.A.m[a][n] - 3.0 * t.A.m[a][n];
  const double lin = 2.0 * symplectic_form(sc.tangent, x) - 3.0 * symplectic_form(t, x);
  EXPECT_NEAR(symplectic_form(sum, x), lin, 1e-12 * std::abs(lin));
}

TEST(SymplecticForm, ConstantScalarPairing) {
  const double eps = 0.1, x = 0.7, y = -1.3;
  const Grid g = Grid::make(eps, 2.0 - eps, 101);
  const Mat id = Mat::Identity(2, 2);
  TangentState a = zero_tangent(g, 2), c = zero_tangent(g, 2);
  for (int n = 0; n < g.n; ++n) {
    a.A.m[1][n] = I1 * x * id;
    c.A.m[0][n] = I1 * y * id;
  }
  EXPECT_NEAR(symplectic_form(a, c), -2.0 * x * y * (2.0 - 2.0 * eps), 1e-13);
  EXPECT_THROW(detail::simpson(Grid::make(0.0, 1.0, 100), std::vector<double>(100)), DimensionMismatch);
}

TEST(RotationField, ConstantPsiFormula) {
  const NahmState st = two_pole_solution(0.3, 0.1, 201);
  const Mat r1 = st.rho[1];
  const TangentState x = rotation_field(st, constant_path(Mat(-r1)));
  for (int n : {0, 57, 200}) {
    const auto& B = st.B.m;
    EXPECT_EQ(max_norm(x.A.m[0][n]), 0.0);
    EXPECT_LT(max_norm(x.A.m[1][n] - bracket(B[1][n], -r1)), 1e-15);
    EXPECT_LT(max_norm(x.A.m[2][n] - (B[3][n] + bracket(B[2][n], -r1))), 1e-15);
    EXPECT_LT(max_norm(x.A.m[3][n] - (-B[2][n] + bracket(B[3][n], -r1))), 1e-15);
  }
}

TEST(RotationField, SolvesLinearisedEquations) {
  const NahmState st = one_pole_solution(0.1, 1.0, 2001);
  EXPECT_LE(linearized_residual(rotation_field(st, constant_path(Mat(-st.rho[1]))), st), 1e-6);
  const NahmState two = two_pole_solution(0.5, 0.05, 2001);
  const MatrixPath psi = admissible_psi(two.rho, two.grid().lo, two.grid().hi, generic_direction());
  EXPECT_LE(linearized_residual(rotation_field(two, psi), two), 1e-6);
}

TEST(RotationField, ZeroStateGivesOnlyTheRotationPart) {
  const Grid g = Grid::make(0.1, 1.9, 51);
  NahmState st;
  st.rho = standard_residues();
  st.B = zero_tangent(g, 2).A;
  const MatrixPath psi = admissible_psi(st.rho, g.lo, g.hi, generic_direction());
  const TangentState x = rotation_field(st, psi);
  for (int n = 0; n < g.n; ++n) {
    EXPECT_LT(max_norm(x.A.m[0][n] - psi.derivative(g.s(n))), 1e-15);
    for (int a = 1; a <= 3; ++a) EXPECT_EQ(max_norm(x.A.m[a][n]), 0.0);
  }
}

TEST(RotationField, WrongBoundaryValuesThrow) {
  const NahmState st = one_pole_solution(0.5, 1.5, 51);
  EXPECT_THROW(rotation_field(st, constant_path(Mat(st.rho[1]))), DomainError);
}

TEST(Contraction, TranslationTangentReducesToBoundaryTerm) {
  const Scenario sc = two_pole_scenario(0.5, 1e-3, 801);
  const TangentState t = translation_tangent(sc.state.grid(), 2, Eigen::Vector3d(0.9, 0.4, -0.2));
  const ContractionResult r = contraction_identity(sc.state, t, sc.psi);
  EXPECT_EQ(r.rhs, 0.0);
  EXPECT_LE(std::abs(r.lhs - r.boundary), 1e-10);
  EXPECT_LE(std::abs(r.boundary), 1e-12);
}

TEST(Contraction, OnePoleAtSmallEpsilon) {
  const ContractionResult r = run(one_pole_scenario(1e-3, 2001, 1e-3));
  EXPECT_LE(r.rel_err, 1e-4);
  EXPECT_LT(r.tangent_residual, 1e-4);
  EXPECT_GT(std::abs(r.rhs), 0.1);
  EXPECT_DOUBLE_EQ(r.epsilon, 1e-3);
  EXPECT_DOUBLE_EQ(r.h, (2.0 - 2e-3) / 2000);
}

TEST(Contraction, HoldsForSeveralAdmissiblePsi) {
  Scenario sc = two_pole_scenario(0.5, 1e-2, 801);
  const std::array<Mat, 3> dirs = {Mat(I1 * pauli(1)), Mat(I1 * (pauli(2) - 2.0 * pauli(3))), Mat(3.0 * I1 * pauli(3))};
  for (const Mat& z : dirs) {
    sc.psi = admissible_psi(sc.state.rho, sc.state.grid().lo, sc.state.grid().hi, z);
    EXPECT_LE(run(sc).rel_err, 1e-6);
  }
}

TEST(Contraction, EpsilonSweepFirstOrder) {
  std::vector<double> errs;
  for (double eps : {1e-2, 5e-3, 2.5e-3}) errs.push_back(run(two_pole_scenario(0.5, eps, 2001)).limit_err);
  for (std::size_t i = 1; i < errs.size(); ++i) EXPECT_GE(order(errs[i - 1], errs[i]), 1.0 - 0.05);
  double prev = 1.0;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const double e = run(two_pole_scenario(0.5, eps, 2001)).limit_err;
    EXPECT_LT(e, prev);
    prev = e;
  }
}

TEST(Contraction, GridSweepSecondOrder) {
  const double coarse = run(one_pole_scenario(1e-2, 51)).rel_err;
  const double mid = run(one_pole_scenario(1e-2, 101)).rel_err;
  const double fine = run(one_pole_scenario(1e-2, 201)).rel_err;
  const double finest = run(one_pole_scenario(1e-2, 401)).rel_err;
  EXPECT_GE(order(coarse, mid), 2.0);
  EXPECT_GE(order(mid, fine), 2.0);
  EXPECT_GE(order(fine, finest), 2.0);
}

TEST(Contraction, RejectsNonTangent) {
  const Scenario sc = two_pole_scenario(0.5, 0.05, 401);
  TangentState bad = zero_tangent(sc.state.grid(), 2);
  for (int n = 0; n < bad.grid().n; ++n) bad.A.m[1][n] = I1 * pauli(1) * bad.grid().s(n);
  EXPECT_THROW(contraction_identity(sc.state, bad, sc.psi), ToleranceError);
}

TEST(Translations, PreserveResidualAndHaveConstantNorm) {
  const NahmState st = two_pole_solution(0.5, 0.1, 401);
  const Eigen::Vector3d x(0.5, -2.0, 1.5);
  EXPECT_NEAR(nahm_residual(translation_action(st, x)), nahm_residual(st), 1e-10);
  const double expect = std::sqrt(2.0 * x.squaredNorm() * (2.0 - 0.2));
  for (double shift : {0.0, 3.0}) {
    const NahmState moved = translation_action(st, Eigen::Vector3d::Constant(shift));
    EXPECT_NEAR(tangent_norm(translation_tangent(moved.grid(), 2, x)), expect, 1e-12 * expect);
  }
}

TEST(Output, CsvShape) {
  std::ostringstream os;
  write_csv(os, one_pole_solution(0.5, 1.0, 11));
  std::istringstream is(os.str());
  std::string line;
  int rows = 0;
  while (std::getline(is, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 32);
    ++rows;
  }
  EXPECT_EQ(rows, 12);
}
