#include <gtest/gtest.h>

#include "oracles.hpp"
#include "oprange/random.hpp"
#include "oprange/relations.hpp"

using namespace oprange;
using oracle::diag;
using oracle::mat2;
using oracle::vec;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidArgument;
}

// Random PSD relation-free operator with eigenvalues spread over [0, top].
PsdOperator spread_psd(Index n, double top, Rng& rng) {
  const Matrix u = random_unitary(n, rng);
  RealVector values(n);
  for (Index k = 0; k < n; ++k) values(k) = top * std::pow(rng.uniform(), 3.0);
  return make_psd(u * values.asDiagonal() * u.adjoint());
}

NonnegRelation line_relation(const Vector& direction, double value) {
  const Vector unit = direction / direction.norm();
  return NonnegRelation::from_resolvent(oracle::outer(unit) / (1.0 + value));
}

}  // namespace

TEST(FromOperator, Examples) {
  EXPECT_LT((from_operator(make_psd(Matrix::Zero(3, 3))).resolvent().matrix() - identity(3)).norm(), 1e-15);
  const NonnegRelation rel = from_operator(make_psd(diag({1, 3})));
  EXPECT_LT((rel.resolvent().matrix() - diag({0.5, 0.25})).norm(), 1e-15);
  EXPECT_TRUE(rel.is_operator());
}

TEST(FromOperator, RoundTripOnRandomOperators) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = rng.integer(1, 32);
    const PsdOperator t = make_psd(random_psd(n, rng.integer(0, n), rng));
    const NonnegRelation rel = from_operator(t);
    EXPECT_LT((rel.resolvent().matrix() - (identity(n) + t.matrix()).inverse()).norm(), 1e-12) << trial;
    EXPECT_LT((to_operator(rel).matrix() - t.matrix()).norm(), 1e-9) << trial;
  }
}

TEST(FromOperator, LargeEigenvaluesSurvive) {
  const PsdOperator t = make_psd(diag({1e9, 2.0, 0.0}));
  EXPECT_NEAR(std::real(to_operator(from_operator(t)).matrix()(0, 0)), 1e9, 1e-3);
}

TEST(NonnegRelation, InvariantsAreEnforced) {
  EXPECT_EQ(kind_of([] { NonnegRelation::from_resolvent(2.0 * identity(2)); }), ErrorKind::NotContraction);
  EXPECT_EQ(kind_of([] { NonnegRelation::from_resolvent(diag({1, -0.5})); }), ErrorKind::NotPsd);
  const NonnegRelation multi = NonnegRelation::from_resolvent(diag({0.5, 0}));
  EXPECT_FALSE(multi.is_operator());
  EXPECT_EQ(multi.mul_part().dim(), 1);
  EXPECT_EQ(kind_of([&] { to_operator(multi); }), ErrorKind::NotOperator);
  const NonnegRelation everything = NonnegRelation::from_resolvent(Matrix::Zero(3, 3));
  EXPECT_TRUE(everything.dom_closure().is_trivial());
}

TEST(FormValue, Examples) {
  const NonnegRelation two = from_operator(make_psd(diag({2})));
  EXPECT_NEAR(std::real(form_value(two, vec({1}), vec({1}))), 2.0, 1e-14);

  Rng rng(2);
  const NonnegRelation zero = from_operator(make_psd(Matrix::Zero(3, 3)));
  const Vector u = random_gaussian(3, 1, rng);
  const Vector v = random_gaussian(3, 1, rng);
  EXPECT_LT(std::abs(form_value(zero, u, v)), 1e-14);

  const Subspace m = Subspace::coordinate(3, {0, 1});
  const NonnegRelation half = NonnegRelation::from_resolvent(m.projection() / 2.0);
  const Vector in_m = m.projection() * u;
  EXPECT_NEAR(std::real(form_value(half, in_m, in_m)), in_m.squaredNorm(), 1e-13);
  EXPECT_EQ(kind_of([&] { form_value(half, u, in_m); }), ErrorKind::OutOfFormDomain);
}

TEST(FormValue, MatchesSquareRootForm) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = rng.integer(1, 10);
    const PsdOperator t = make_psd(random_psd(n, rng.integer(0, n), rng, 0.1, 50.0));
    const Matrix root = oracle::sqrtm(t.matrix() + 1e-300 * identity(n));
    const Vector u = random_gaussian(n, 1, rng);
    const Vector v = random_gaussian(n, 1, rng);
    const Scalar expected = (root * u).dot(root * v);
    EXPECT_LT(std::abs(form_value(from_operator(t), u, v) - expected), 1e-8 * (1.0 + std::abs(expected))) << trial;
  }
}

TEST(SplitPair, ZeroOperator) {
  const Subspace m = Subspace::coordinate(3, {1});
  const PairSplit s = split_pair(make_psd(Matrix::Zero(3, 3)), m);
  EXPECT_LT((s.rel1.resolvent().matrix() - m.projection()).norm(), 1e-15);
  EXPECT_LT(s.rel1.form_matrix().norm(), 1e-14);
  EXPECT_TRUE(same_subspace(s.rel1.mul_part(), m.complement()));
  EXPECT_TRUE(s.domains_disjoint);
  EXPECT_TRUE(s.kernel_claim);
}

TEST(SplitPair, TwoByTwoArithmetic) {
  const Subspace m = Subspace::span(vec({1, 1}));
  const PairSplit s = split_pair(make_psd(diag({1, 3})), m);
  const Matrix root = diag({1.0 / std::sqrt(2.0), 0.5});
  EXPECT_LT((s.rel1.resolvent().matrix() - root * m.projection() * root).norm(), 1e-15);
  EXPECT_LT((s.rel2.resolvent().matrix() - root * m.complement().projection() * root).norm(), 1e-15);
  EXPECT_LE(s.resolvent_sum_residual, 1e-12);
  EXPECT_LE(s.form_defect, 1e-8);
  EXPECT_LE(s.graph_orthogonality, 1e-8);
  EXPECT_TRUE(s.domains_match);
  EXPECT_TRUE(s.domains_span);
  // T1 is multivalued off R^{1/2} M, with operator part 1/mu - 1 there.
  EXPECT_EQ(s.rel1.operator_values().size(), 1);
  const double mu = std::real((root * m.projection() * root).trace());
  EXPECT_NEAR(s.rel1.operator_values()(0), 1.0 / mu - 1.0, 1e-13);
}

TEST(SplitPair, RandomInstances) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = rng.integer(2, 12);
    const PsdOperator t = spread_psd(n, std::pow(10.0, rng.uniform(0.0, 4.0)), rng);
    const Subspace m = random_subspace(n, rng.integer(1, n - 1), rng);
    const PairSplit s = split_pair(t, m, 20, rng.next_seed());
    EXPECT_LE(s.resolvent_sum_residual, 1e-12) << trial;
    EXPECT_LE(s.graph_orthogonality, 1e-8) << trial;
    EXPECT_LE(s.form_defect, 1e-8) << trial;
    EXPECT_LE(s.decomposition_residual, 1e-9) << trial;
    EXPECT_TRUE(s.domains_match) << trial;
    EXPECT_TRUE(s.domains_disjoint) << trial;
    EXPECT_TRUE(s.domains_span) << trial;
    EXPECT_TRUE(s.pieces_in_domains) << trial;
    EXPECT_TRUE(s.kernel_claim) << trial;
  }
}

TEST(SplitPair, DimensionMismatch) {
  EXPECT_EQ(kind_of([] { split_pair(make_psd(identity(3)), Subspace::coordinate(2, {0})); }),
            ErrorKind::DimensionMismatch);
}

TEST(SplitN, SinglePartIsTheOperator) {
  Rng rng(5);
  const PsdOperator t = make_psd(random_psd(4, 4, rng));
  const SplitFamily family = split_n(t, {Subspace::full(4)});
  ASSERT_EQ(family.relations.size(), 1u);
  EXPECT_LT((to_operator(family.relations[0]).matrix() - t.matrix()).norm(), 1e-10);
}

TEST(SplitN, CoordinateSplitOfDiagonal) {
  const PsdOperator t = make_psd(diag({0, 1, 2, 5}));
  std::vector<Subspace> parts;
  for (Index k = 0; k < 4; ++k) parts.push_back(Subspace::coordinate(4, {k}));
  const SplitFamily family = split_n(t, parts);
  for (Index k = 0; k < 4; ++k) {
    EXPECT_EQ(family.relations[static_cast<std::size_t>(k)].resolvent().rank(), 1);
    EXPECT_NEAR(std::real(family.relations[static_cast<std::size_t>(k)].resolvent().matrix()(k, k)),
                1.0 / (1.0 + std::real(t.matrix()(k, k))), 1e-15);
  }
  EXPECT_LE(family.resolvent_sum_residual, 1e-15);
  EXPECT_TRUE(family.domains_disjoint);
}

TEST(SplitN, RandomThreeWaySplit) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const PsdOperator t = spread_psd(6, 100.0, rng);
    const Matrix u = random_unitary(6, rng);
    std::vector<Subspace> parts{Subspace::from_orthonormal(u.leftCols(1)), Subspace::from_orthonormal(u.middleCols(1, 3)),
                                Subspace::from_orthonormal(u.rightCols(2))};
    const SplitFamily family = split_n(t, parts);
    EXPECT_LE(family.resolvent_sum_residual, 1e-12);
    EXPECT_LE(family.graph_orthogonality, 1e-9);
    EXPECT_TRUE(family.domains_disjoint);
    EXPECT_TRUE(family.domains_span);
  }
}

TEST(SplitN, RejectsBadDecompositions) {
  const PsdOperator t = make_psd(identity(3));
  EXPECT_EQ(kind_of([&] { split_n(t, {Subspace::coordinate(3, {0, 1}), Subspace::span(vec({0, 1, 1}))}); }),
            ErrorKind::NotOrthogonal);
  EXPECT_EQ(kind_of([&] { split_n(t, {Subspace::coordinate(3, {0}), Subspace::coordinate(3, {1})}); }),
            ErrorKind::NotSpanning);
  EXPECT_EQ(kind_of([&] { split_n(t, {}); }), ErrorKind::EmptyList);
}

TEST(CompletePair, TwoByTwoExample) {
  const NonnegRelation t1 = NonnegRelation::from_resolvent(diag({0.5, 0}));
  const Completion c = complete_pair(t1, make_psd(diag({0, 1})));
  EXPECT_LT((c.b - diag({0, 1})).norm(), 1e-15);
  EXPECT_LT((c.t.resolvent().matrix() - diag({0.5, 1})).norm(), 1e-15);
  EXPECT_LT((c.projection - diag({1, 0})).norm(), 1e-14);
  EXPECT_LT((to_operator(c.t).matrix() - diag({1, 0})).norm(), 1e-14);
  EXPECT_LE(c.reconstruction_residual, 1e-8);
  EXPECT_TRUE(c.pass);
}

TEST(CompletePair, ZeroX) {
  const NonnegRelation t1 = NonnegRelation::from_resolvent(diag({0.5, 0.25, 0}));
  const Completion c = complete_pair(t1, make_psd(Matrix::Zero(3, 3)));
  EXPECT_EQ(c.b.norm(), 0.0);
  EXPECT_LT((c.t.resolvent().matrix() - t1.resolvent().matrix()).norm(), 1e-15);
  EXPECT_TRUE(c.t2.dom_closure().is_trivial());
  EXPECT_TRUE(c.pass);
}

TEST(CompletePair, HypothesisFailures) {
  const NonnegRelation full = from_operator(make_psd(diag({1, 2})));
  EXPECT_EQ(kind_of([&] { complete_pair(full, make_psd(diag({0, 0.5}))); }), ErrorKind::HypothesisViolated);
  const NonnegRelation t1 = NonnegRelation::from_resolvent(diag({0.5, 0}));
  EXPECT_EQ(kind_of([&] { complete_pair(t1, make_psd(diag({0, 2}))); }), ErrorKind::NotContraction);
  EXPECT_EQ(kind_of([&] { complete_pair(t1, make_psd(diag({0.5, 0.5}))); }),
            ErrorKind::HypothesisViolated);
}

TEST(CompletePair, RandomSingularPairs) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Index r1 = rng.integer(1, 3);
    const Index r2 = rng.integer(1, 4 - r1);
    const PsdPair pair = random_psd_pair(4, r1, r2, 0, rng, 0.1, 0.95);
    const Completion c = complete_pair(NonnegRelation::from_resolvent(pair.first), make_psd(pair.second));
    EXPECT_TRUE(c.pass) << trial << " " << c.projection_defect << " " << c.reconstruction_residual << " "
                        << c.split_residual;
  }
}

TEST(ChainFamilies, ExhaustionEndpoint) {
  const ChainFamilies chain = chain_families(make_psd(diag({1, 3})), {Subspace::coordinate(2, {0}), Subspace::full(2)});
  ASSERT_EQ(chain.levels.size(), 2u);
  EXPECT_EQ(chain.levels[1].rel1.resolvent().matrix().norm(), 0.0);
  EXPECT_LT((chain.levels[1].rel2.resolvent().matrix() - diag({0.5, 0.25})).norm(), 1e-15);
  EXPECT_LT((chain.levels[0].rel2.resolvent().matrix() - diag({0.5, 0})).norm(), 1e-15);
  EXPECT_TRUE(chain.exhausts);
  EXPECT_LE(chain.endpoint_residual, 1e-15);
  EXPECT_LE(chain.semigroup_residual, 1e-14);
}

TEST(ChainFamilies, CoordinateFlagsOnRandomOperators) {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const PsdOperator t = spread_psd(4, 50.0, rng);
    std::vector<Subspace> ns;
    for (Index k = 1; k <= 4; ++k) {
      std::vector<Index> idx(static_cast<std::size_t>(k));
      std::iota(idx.begin(), idx.end(), Index{0});
      ns.push_back(Subspace::coordinate(4, idx));
    }
    const ChainFamilies chain = chain_families(t, ns);
    EXPECT_TRUE(chain.r1_decreasing);
    EXPECT_TRUE(chain.r2_increasing);
    EXPECT_TRUE(chain.domains1_nested);
    EXPECT_TRUE(chain.domains2_nested);
    EXPECT_LE(chain.endpoint_residual, 1e-10);
    EXPECT_LE(chain.semigroup_residual, 1e-10);
    for (std::size_t j = 1; j < chain.levels.size(); ++j) {
      EXPECT_LE(chain.levels[j].r1_norm, chain.levels[j - 1].r1_norm + 1e-15);
      EXPECT_LE(chain.levels[j].r2_gap, chain.levels[j - 1].r2_gap + 1e-15);
    }
    for (const ChainLevel& level : chain.levels) {
      EXPECT_LE(level.sum_residual, 1e-12);
      EXPECT_LE(level.graph_orthogonality, 1e-8);
      EXPECT_TRUE(level.domains_span);
    }
  }
}

TEST(ChainFamilies, SingleStepIsASplit) {
  Rng rng(9);
  const PsdOperator t = make_psd(random_psd(3, 3, rng));
  const Subspace n1 = random_subspace(3, 1, rng);
  const ChainFamilies chain = chain_families(t, {n1});
  const PairSplit split = split_pair(t, n1.complement());
  EXPECT_FALSE(chain.exhausts);
  EXPECT_LT((chain.levels[0].rel1.resolvent().matrix() - split.rel1.resolvent().matrix()).norm(), 1e-14);
  EXPECT_LT((chain.levels[0].rel2.resolvent().matrix() - split.rel2.resolvent().matrix()).norm(), 1e-14);
}

TEST(ChainFamilies, RejectsUnnestedSubspaces) {
  const PsdOperator t = make_psd(identity(3));
  EXPECT_EQ(kind_of([&] { chain_families(t, {Subspace::coordinate(3, {0}), Subspace::coordinate(3, {1, 2})}); }),
            ErrorKind::NotNested);
  EXPECT_EQ(kind_of([&] { chain_families(t, {Subspace::coordinate(3, {0}), Subspace::coordinate(3, {0})}); }),
            ErrorKind::NotNested);
}

TEST(Semigroup, Examples) {
  const NonnegRelation zero = from_operator(make_psd(Matrix::Zero(2, 2)));
  for (Scalar z : {Scalar(0.0), Scalar(1.0), Scalar(2.0, -3.0)})
    EXPECT_LT((semigroup(zero, z) - identity(2)).norm(), 1e-15);
  EXPECT_EQ(semigroup(NonnegRelation::from_resolvent(Matrix::Zero(3, 3)), 1.0).norm(), 0.0);
  const Matrix d = semigroup(from_operator(make_psd(diag({1, 3}))), 1.0);
  EXPECT_LT((d - diag({std::exp(-1.0), std::exp(-3.0)})).norm(), 1e-15);
  EXPECT_EQ(kind_of([&] { semigroup(zero, Scalar(-0.1, 1.0)); }), ErrorKind::InvalidZ);
}

TEST(Semigroup, MatchesMatrixExponential) {
  Rng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = rng.integer(1, 8);
    const PsdOperator t = make_psd(random_psd(n, rng.integer(0, n), rng));
    const Scalar z(rng.uniform(0.0, 2.0), rng.uniform(-3.0, 3.0));
    EXPECT_LT((semigroup(from_operator(t), z) - oracle::expm(-z * t.matrix())).norm(), 1e-9) << trial;
  }
}

TEST(Semigroup, AnnihilatesTheMultivaluedPart) {
  const NonnegRelation rel = NonnegRelation::from_resolvent(diag({0.5, 0}));
  EXPECT_LT((semigroup(rel, 2.0) - diag({std::exp(-2.0), 0})).norm(), 1e-15);
}

TEST(Euler, ScalarRate) {
  const NonnegRelation one = from_operator(make_psd(diag({1})));
  const EulerSweep sweep = euler_sweep(one, 1.0);
  ASSERT_TRUE(sweep.slope.has_value());
  EXPECT_NEAR(*sweep.slope, -1.0, 0.1);
  EXPECT_TRUE(sweep.rate_ok);
  for (std::size_t k = 0; k < sweep.ns.size(); ++k) {
    const double n = sweep.ns[k];
    EXPECT_NEAR(sweep.errors[k], std::pow(1.0 + 1.0 / n, -n) - std::exp(-1.0), 1e-14);
    EXPECT_NEAR(sweep.errors[k] * 2.0 * n / std::exp(-1.0), 1.0, 2.0 / n);
  }
}

TEST(Euler, ZeroOperatorIsExact) {
  const EulerSweep sweep = euler_sweep(from_operator(make_psd(Matrix::Zero(2, 2))), Scalar(1.0, 0.5));
  for (double e : sweep.errors) EXPECT_EQ(e, 0.0);
  EXPECT_FALSE(sweep.slope.has_value());
}

TEST(Euler, RotatedSector) {
  const Scalar z = std::polar(1.0, M_PI / 4);
  const EulerSweep sweep = euler_sweep(from_operator(make_psd(diag({1, 2}))), z);
  EXPECT_TRUE(sweep.rate_ok) << *sweep.slope;
  EXPECT_GT(sweep.constant, 0.0);
  for (std::size_t k = 0; k < sweep.ns.size(); ++k)
    EXPECT_LE(sweep.errors[k], sweep.constant / (sweep.ns[k] * 0.5) + 1e-15);
}

TEST(Euler, MultivaluedDirectionsContributeNothing) {
  const NonnegRelation rel = NonnegRelation::from_resolvent(diag({0.5, 0}));
  const EulerResult r = euler_approx(rel, 1.0, 4);
  EXPECT_EQ(std::abs(r.approx(1, 1)), 0.0);
  EXPECT_NEAR(std::real(r.approx(0, 0)), std::pow(1.25, -4), 1e-15);
}

TEST(Euler, InvalidArguments) {
  const NonnegRelation one = from_operator(make_psd(diag({1})));
  EXPECT_EQ(kind_of([&] { euler_approx(one, Scalar(0.0, 1.0), 4); }), ErrorKind::InvalidZ);
  EXPECT_EQ(kind_of([&] { euler_approx(one, -1.0, 4); }), ErrorKind::InvalidZ);
  EXPECT_EQ(kind_of([&] { euler_approx(one, 1.0, 0); }), ErrorKind::InvalidArgument);
}

TEST(Trotter, OrthogonalDomainsVanishAtOnce) {
  const NonnegRelation a = line_relation(vec({1, 0}), 0.5);
  const NonnegRelation b = line_relation(vec({0, 1}), 2.0);
  EXPECT_EQ(trotter_product(a, b, 1.0, 1).norm(), 0.0);
  const TrotterSweep sweep = trotter_sweep(a, b, 1.0);
  EXPECT_TRUE(sweep.vanishing);
  EXPECT_EQ(sweep.limit.norm(), 0.0);
}

TEST(Trotter, GeometricDecayAtQuarterTurn) {
  const NonnegRelation a = line_relation(vec({1, 0}), 0.0);
  const NonnegRelation b = line_relation(vec({1, 1}), 0.0);
  const TrotterSweep sweep = trotter_sweep(a, b, 1.0, {1, 2, 4, 8, 16});
  for (std::size_t k = 0; k < sweep.ns.size(); ++k)
    EXPECT_NEAR(sweep.norms[k], std::pow(std::cos(M_PI / 4), 2 * sweep.ns[k] - 1), 1e-14);
  EXPECT_TRUE(sweep.decreasing);
}

TEST(Trotter, VanishingForSmallAngles) {
  Rng rng(11);
  for (double angle : {M_PI / 8, M_PI / 5, M_PI / 3}) {
    const NonnegRelation a = line_relation(vec({1, 0}), rng.uniform(0.0, 3.0));
    const NonnegRelation b = line_relation(vec({std::cos(angle), std::sin(angle)}), rng.uniform(0.0, 3.0));
    const TrotterSweep sweep = trotter_sweep(a, b, 1.0);
    EXPECT_TRUE(sweep.vanishing);
    EXPECT_LE(sweep.norms.back(), 1e-3) << angle;
  }
}

TEST(Trotter, NestedCaseTendsToDoubledPart) {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = rng.integer(2, 6);
    const PsdOperator t = make_psd(random_psd(n, n, rng));
    const PairSplit s = split_pair(t, random_subspace(n, rng.integer(1, n - 1), rng), 0);
    const NonnegRelation whole = from_operator(t);
    const TrotterSweep sweep = trotter_sweep(whole, s.rel1, 1.0);
    EXPECT_TRUE(sweep.nested);
    Matrix doubled = s.rel1.form_matrix() * 2.0;
    const Matrix expected = s.rel1.operator_frame() *
                            (-2.0 * s.rel1.operator_values()).array().exp().matrix().asDiagonal() *
                            s.rel1.operator_frame().adjoint();
    EXPECT_LT((sweep.limit - expected).norm(), 1e-9) << trial;
    EXPECT_TRUE(sweep.decreasing) << trial;
    EXPECT_LT(sweep.distances.back(), sweep.distances.front());
  }
}
