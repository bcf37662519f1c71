#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "helpers.hpp"
#include "hkl2/exterior_algebra.hpp"

using namespace hkl2;
using namespace hkl2::ext;
using testing_support::random_form;
using testing_support::random_mixed;

namespace {

const cplx I1(0.0, 1.0);

FormVector e(int dim, std::initializer_list<int> idx) { return FormVector::basis(dim, MultiIndex(idx)); }

} // namespace

TEST(MultiIndex, RejectsUnorderedAndOutOfRange) {
  EXPECT_THROW(MultiIndex({2, 1}), DomainError);
  EXPECT_THROW(MultiIndex({0}), DomainError);
  EXPECT_THROW(MultiIndex({1, 5}).mask(4), DomainError);
  EXPECT_EQ(MultiIndex::from_mask(0b1010), MultiIndex({2, 4}));
}

TEST(BasisTable, LexicographicWithinDegree) {
  const auto& t = basis_table(4);
  ASSERT_EQ(t.by_degree[2].size(), 6u);
  std::vector<std::string> labels;
  for (Mask m : t.by_degree[2]) labels.push_back(MultiIndex::from_mask(m).label());
  EXPECT_EQ(labels, (std::vector<std::string>{"e1^e2", "e1^e3", "e1^e4", "e2^e3", "e2^e4", "e3^e4"}));
  EXPECT_EQ(degree_size(8, 4), 70);
}

TEST(Wedge, BasisCase) {
  const FormVector w = wedge(e(4, {1}), e(4, {2}));
  EXPECT_EQ(w[MultiIndex({1, 2})], cplx(1.0));
  EXPECT_EQ(w.pure_degree(), 2);
}

TEST(Wedge, Antisymmetry) {
  const FormVector w = wedge(e(4, {1}) + e(4, {2}), e(4, {1}));
  EXPECT_EQ(w[MultiIndex({1, 2})], cplx(-1.0));
  EXPECT_EQ(w.terms().size(), 1u);
}

TEST(Wedge, GradedCommutativeAndAssociative) {
  std::mt19937_64 rng(11);
  for (int p = 0; p <= 4; ++p)
    for (int q = 0; q <= 4; ++q) {
      const FormVector a = random_form(8, p, rng), b = random_form(8, q, rng);
      const double sign = (p * q) % 2 ? -1.0 : 1.0;
      EXPECT_LT((wedge(a, b) - sign * wedge(b, a)).max_abs(), 1e-12);
    }
  const FormVector a = random_mixed(4, rng), b = random_mixed(4, rng), c = random_mixed(4, rng);
  EXPECT_LT((wedge(wedge(a, b), c) - wedge(a, wedge(b, c))).max_abs(), 1e-12);
}

TEST(Wedge, DimensionMismatch) { EXPECT_THROW(wedge(FormVector(4), FormVector(8)), DimensionMismatch); }

TEST(HodgeStar, OrthonormalExamples) {
  const Metric g = Metric::euclidean(4);
  EXPECT_LT((hodge_star(e(4, {1, 2}), g) - e(4, {3, 4})).max_abs(), 1e-15);
  EXPECT_LT((hodge_star(FormVector::scalar(4, 1.0), g) - e(4, {1, 2, 3, 4})).max_abs(), 1e-15);
  EXPECT_THROW(hodge_star(e(4, {1}) + e(4, {1, 2}), g), DegreeError);
}

TEST(HodgeStar, DoubleStarSign) {
  std::mt19937_64 rng(3);
  for (int n : {4, 8}) {
    const Metric g = Metric::euclidean(n);
    for (int p = 0; p <= n; ++p) {
      const FormVector a = random_form(n, p, rng);
      const double sign = (p * (n - p)) % 2 ? -1.0 : 1.0;
      EXPECT_LT((hodge_star(hodge_star(a, g), g) - sign * a).max_abs(), 1e-12) << n << ' ' << p;
    }
  }
}

TEST(HodgeStar, GeneralMetricDefiningProperty) {
  std::mt19937_64 rng(5);
  Eigen::MatrixXd m = Eigen::MatrixXd::Random(4, 4);
  const Metric g(m * m.transpose() + 4.0 * Eigen::MatrixXd::Identity(4, 4));
  const FormVector vol = hodge_star(FormVector::scalar(4, 1.0), g);
  for (int p = 0; p <= 4; ++p) {
    const FormVector a = random_form(4, p, rng, false), b = random_form(4, p, rng, false);
    const FormVector lhs = wedge(a, hodge_star(b, g));
    const FormVector rhs = inner(a, b, g) * vol;
    EXPECT_LT((lhs - rhs).max_abs(), 1e-10);
  }
  EXPECT_NEAR(vol[MultiIndex({1, 2, 3, 4})].real(), std::sqrt(g.matrix().determinant()), 1e-10);
}

TEST(Metric, Validation) {
  EXPECT_THROW(Metric(-Eigen::MatrixXd::Identity(4, 4)), DomainError);
  EXPECT_THROW(Metric(Eigen::MatrixXd::Identity(4, 4), 2), DomainError);
}

TEST(QuaternionicStructure, StandardKahlerForms) {
  const auto q = QuaternionicStructure::standard(1);
  EXPECT_LT((q.kahler_form(Axis::I) - (e(4, {1, 2}) + e(4, {3, 4}))).max_abs(), 1e-15);
  EXPECT_LT((q.kahler_form(Axis::J) - (e(4, {1, 3}) - e(4, {2, 4}))).max_abs(), 1e-15);
  EXPECT_LT((q.kahler_form(Axis::K) - (e(4, {1, 4}) + e(4, {2, 3}))).max_abs(), 1e-15);
  for (int a = 1; a <= 3; ++a) {
    const FormVector w = q.kahler_form(axis_from_int(a));
    EXPECT_LT((hodge_star(w, q) - w).max_abs(), 1e-15);
  }
}

TEST(QuaternionicStructure, RejectsBrokenIdentities) {
  const auto q = QuaternionicStructure::standard(1);
  EXPECT_THROW(QuaternionicStructure(q.metric(), q.structure(Axis::I), q.structure(Axis::K), q.structure(Axis::J)),
               DomainError);
  EXPECT_THROW(QuaternionicStructure(q.metric(), 2.0 * q.structure(Axis::I), q.structure(Axis::J),
                                     q.structure(Axis::K)),
               DomainError);
  EXPECT_THROW(axis_from_int(4), DomainError);
}

TEST(Lefschetz, ActionOnScalarsAndOneForms) {
  const auto q = QuaternionicStructure::standard(1);
  EXPECT_LT((lefschetz(Axis::I, FormVector::scalar(4, 1.0), q) - q.kahler_form(Axis::I)).max_abs(), 1e-15);
  const FormVector l = lefschetz(Axis::I, e(4, {1}), q);
  const auto terms = l.terms(1e-15);
  ASSERT_EQ(terms.size(), 1u);
  EXPECT_EQ(terms[0].first, MultiIndex({1, 3, 4}));
  EXPECT_EQ(terms[0].second, cplx(1.0));
}

TEST(Lefschetz, OperatorsCommute) {
  const auto q = QuaternionicStructure::standard(2);
  std::mt19937_64 rng(17);
  const FormVector a = random_mixed(8, rng);
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      const Axis x = axis_from_int(i), y = axis_from_int(j);
      EXPECT_LT((lefschetz(x, lefschetz(y, a, q), q) - lefschetz(y, lefschetz(x, a, q), q)).max_abs(), 1e-12);
    }
}

TEST(LefschetzAdjoint, Examples) {
  const auto q = QuaternionicStructure::standard(1);
  const FormVector l = lefschetz_adjoint(Axis::I, q.kahler_form(Axis::I), q);
  EXPECT_LT((l - FormVector::scalar(4, 2.0)).max_abs(), 1e-14);
  const FormVector asd = e(4, {1, 2}) - e(4, {3, 4});
  EXPECT_LT(lefschetz_adjoint(Axis::I, asd, q).max_abs(), 1e-14);
}

TEST(LefschetzAdjoint, AdjointnessResidual) {
  for (int k : {1, 2}) {
    const auto q = QuaternionicStructure::standard(k);
    const LefschetzAlgebra alg(q);
    std::mt19937_64 rng(23 + k);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const FormVector a = random_mixed(4 * k, rng), b = random_mixed(4 * k, rng);
      for (int i = 1; i <= 3; ++i) {
        const Axis x = axis_from_int(i);
        worst = std::max(worst, std::abs(inner(alg.L(x)(a), b, q.metric()) - inner(a, alg.Lambda(x)(b), q.metric())));
      }
    }
    EXPECT_LE(worst, 1e-12) << "k=" << k;
  }
}

TEST(LefschetzAdjoint, NonFlatMetricStillAdjoint) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Random();
  const Metric g(m * m.transpose() + 3.0 * Eigen::Matrix4d::Identity());
  const auto std4 = QuaternionicStructure::standard(1);
  const FormVector w = std4.kahler_form(Axis::I);
  const AlgebraOperator l = wedge_operator(w), lam = adjoint(l, g);
  std::mt19937_64 rng(31);
  for (int t = 0; t < 20; ++t) {
    const FormVector a = random_mixed(4, rng), b = random_mixed(4, rng);
    EXPECT_LT(std::abs(inner(l(a), b, g) - inner(a, lam(b), g)), 1e-10);
  }
}

TEST(Su2Action, EigenvaluesAndBracket) {
  const auto q = QuaternionicStructure::standard(1);
  const FormVector w11 = q.kahler_form(Axis::I);
  EXPECT_LT(su2_action(Axis::I, w11, q).max_abs(), 1e-15);

  const auto comps = type_components(q.holomorphic_symplectic(), Axis::I, q);
  ASSERT_EQ(comps.size(), 1u);
  for (const auto& c : type_components(q.holomorphic_symplectic().conj(), Axis::I, q)) {
    ASSERT_EQ(c.p, 2);
    EXPECT_LT((su2_action(Axis::I, c.form, q) - 2.0 * I1 * c.form).max_abs(), 1e-14);
  }

  std::mt19937_64 rng(41);
  const LefschetzAlgebra alg(QuaternionicStructure::standard(2));
  const FormVector a = random_mixed(8, rng);
  for (int i = 1; i <= 3; ++i) {
    const Axis x = axis_from_int(i);
    const auto [y, z] = cyclic_next(x);
    const FormVector lhs = alg.sigma(x)(alg.sigma(y)(a)) - alg.sigma(y)(alg.sigma(x)(a));
    EXPECT_LT((lhs - 2.0 * alg.sigma(z)(a)).max_abs(), 1e-12);
  }
}

TEST(Su2Action, SpectrumOnEveryDegree) {
  const auto q = QuaternionicStructure::standard(2);
  const LefschetzAlgebra alg(q);
  for (int d = 0; d <= 8; ++d) {
    const Eigen::MatrixXd s = alg.sigma(Axis::J).block(d, d).matrix;
    const Eigen::VectorXcd ev = s.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      EXPECT_LT(std::abs(ev(i).real()), 1e-10);
      const double m = ev(i).imag();
      EXPECT_LT(std::abs(m - std::round(m)), 1e-9);
      const int pq = static_cast<int>(std::lround(m));
      EXPECT_EQ((pq + d) % 2, 0);
      EXPECT_LE(std::abs(pq), std::min(d, 8 - d));
    }
  }
}

TEST(So5, ResidualsVanishForBothCharges) {
  for (int k : {1, 2}) {
    const So5Report rep = verify_so5(QuaternionicStructure::standard(k));
    EXPECT_LE(rep.max_so5, 1e-12) << k;
    EXPECT_LE(rep.max_grading, 1e-12) << k;
    EXPECT_LE(rep.max_su2, 1e-12) << k;
    EXPECT_LE(rep.max_commuting, 1e-12) << k;
    EXPECT_EQ(rep.so5.size(), 6u * (4 * k + 1));
  }
}

TEST(So5, DetectsWrongSign) {
  const LefschetzAlgebra alg(QuaternionicStructure::standard(1));
  const AlgebraOperator wrong = commutator(alg.L(Axis::I), alg.Lambda(Axis::J)) - alg.sigma(Axis::K);
  EXPECT_GT(blockwise_norm(wrong), 1.0);
}

TEST(LieClosure, GeneratorsAndClosure) {
  const LefschetzAlgebra a1(QuaternionicStructure::standard(1));
  EXPECT_EQ(operator_span_dimension(a1.generators()), 6);
  const ClosureResult r1 = lie_closure(a1);
  EXPECT_EQ(r1.generator_rank, 6);
  const ClosureResult r2 = lie_closure(LefschetzAlgebra(QuaternionicStructure::standard(2)));
  EXPECT_EQ(r1.dimension, r2.dimension);
  EXPECT_EQ(r1.dimension, 10);
}

TEST(TypeComponents, Examples) {
  const auto q = QuaternionicStructure::standard(1);
  auto comps = type_components(q.kahler_form(Axis::I), Axis::I, q);
  ASSERT_EQ(comps.size(), 1u);
  EXPECT_EQ(comps[0].p, 1);
  EXPECT_EQ(comps[0].q, 1);

  comps = type_components(q.holomorphic_symplectic(), Axis::I, q, TypeConvention::holomorphic);
  ASSERT_EQ(comps.size(), 1u);
  EXPECT_EQ(comps[0].p, 2);
  EXPECT_EQ(comps[0].q, 0);

  comps = type_components(q.holomorphic_symplectic(), Axis::I, q, TypeConvention::sigma_eigenvalue);
  ASSERT_EQ(comps.size(), 1u);
  EXPECT_EQ(comps[0].p, 0);
  EXPECT_EQ(comps[0].q, 2);
}

TEST(TypeComponents, RandomTwoFormCompleteness) {
  const auto q = QuaternionicStructure::standard(1);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const FormVector a = random_form(4, 2, rng);
    const auto comps = type_components(a, Axis::K, q);
    ASSERT_EQ(comps.size(), 3u);
    FormVector sum(4);
    for (const auto& c : comps) sum += c.form;
    EXPECT_LT((sum - a).max_abs(), 1e-12);
  }
  EXPECT_THROW(type_components(e(4, {1}) + e(4, {1, 2}), Axis::I, q), DegreeError);
}

TEST(TypeComponents, HolomorphicOneForms) {
  const auto q = QuaternionicStructure::standard(1);
  const FormVector dz = e(4, {1}) + I1 * e(4, {2});
  const auto comps = type_components(dz, Axis::I, q, TypeConvention::holomorphic);
  ASSERT_EQ(comps.size(), 1u);
  EXPECT_EQ(comps[0].p, 1);
}

TEST(MiddleKernel, ChargeOneIsAntiSelfDual) {
  const auto q = QuaternionicStructure::standard(1);
  const LefschetzAlgebra alg(q);
  const auto ker = middle_kernel(alg);
  ASSERT_EQ(ker.size(), 3u);
  const Eigen::MatrixXd asd = duality_eigenbasis(q.metric(), -1);
  EXPECT_LE(numeric::subspace_distance(stack_blocks(ker, 2), Eigen::MatrixXcd(asd.cast<cplx>())), 1e-10);
  for (const auto& eta : ker) {
    EXPECT_LT((hodge_star(eta, q) + eta).max_abs(), 1e-12);
    for (int i = 1; i <= 3; ++i) {
      const Axis x = axis_from_int(i);
      EXPECT_LT(alg.sigma(x)(eta).max_abs(), 1e-12);
      const auto comps = type_components(eta, x, q);
      ASSERT_EQ(comps.size(), 1u);
      EXPECT_EQ(comps[0].p, 1);
      EXPECT_EQ(comps[0].q, 1);
    }
  }
}

TEST(MiddleKernel, ChargeTwoIsSelfDual) {
  const auto q = QuaternionicStructure::standard(2);
  const LefschetzAlgebra alg(q);
  const auto ker = middle_kernel(alg);
  EXPECT_EQ(ker.size(), 14u);
  for (const auto& eta : ker) {
    EXPECT_LT((hodge_star(eta, q) - eta).max_abs(), 1e-12);
    for (int i = 1; i <= 3; ++i) {
      const Axis x = axis_from_int(i);
      EXPECT_LT(alg.sigma(x)(eta).max_abs(), 1e-12);
      EXPECT_LT(alg.L(x)(eta).max_abs(), 1e-12);
      EXPECT_LT(alg.Lambda(x)(eta).max_abs(), 1e-12);
    }
  }
}

TEST(OperatorMatrix, ShapesAndCsv) {
  const LefschetzAlgebra alg(QuaternionicStructure::standard(2));
  const OperatorMatrix m = alg.L(Axis::I).block(3, 5);
  EXPECT_EQ(m.matrix.rows(), 56);
  EXPECT_EQ(m.matrix.cols(), 56);
  const OperatorMatrix s = alg.Lambda(Axis::I).block(2, 0);
  EXPECT_EQ(s.matrix.rows(), 1);
  EXPECT_EQ(s.matrix.cols(), 28);
  std::ostringstream os;
  write_csv(os, alg.L(Axis::I).block(0, 2));
  EXPECT_EQ(os.str().substr(0, 20), "target\\source,1\ne1^e");
}
