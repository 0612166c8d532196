#include <gtest/gtest.h>

#include "oracles.hpp"
#include "oprange/random.hpp"
#include "oprange/shorting.hpp"

using namespace oprange;
using oracle::diag;
using oracle::mat2;

namespace {

const Matrix kTwoOne = mat2(2, 1, 1, 1);

double parallel_routes_disagreement(const PsdOperator& f, const PsdOperator& g) {
  const Matrix route1 = parallel_sum(f, g).matrix();
  const Matrix route2 = parallel_sum_variational(f, g).matrix();
  const Matrix route3 = parallel_sum_limit(f, g).value.matrix();
  return detail::max_pairwise_distance({&route1, &route2, &route3});
}

Subspace span_of(std::initializer_list<Vector> vectors, Index n) {
  Matrix m(n, static_cast<Index>(vectors.size()));
  Index k = 0;
  for (const Vector& v : vectors) m.col(k++) = v;
  return Subspace::span(m);
}

}  // namespace

TEST(ParallelSum, IdentityWithItselfIsHalf) {
  const PsdOperator i = make_psd(identity(3));
  EXPECT_LT((parallel_sum(i, i).matrix() - identity(3) / 2.0).norm(), 1e-14);
}

TEST(ParallelSum, DisjointRangesGiveZero) {
  const PsdOperator f = make_psd(diag({1, 0}));
  const PsdOperator g = make_psd(diag({0, 1}));
  EXPECT_LT(parallel_sum(f, g).matrix().norm(), 1e-15);
  EXPECT_LT(parallel_sum_variational(f, g).matrix().norm(), 1e-15);
  EXPECT_LT(parallel_sum_limit(f, g).value.matrix().norm(), 1e-9);
}

TEST(ParallelSum, ZeroOperands) {
  const PsdOperator zero = make_psd(Matrix::Zero(2, 2));
  EXPECT_EQ(parallel_sum(zero, zero).matrix().norm(), 0.0);
}

TEST(ParallelSum, InvertAndAddOracle) {
  const PsdOperator f = make_psd(kTwoOne);
  const PsdOperator g = make_psd(identity(2));
  const Matrix expected = mat2(3, 1, 1, 2) / 5.0;
  EXPECT_LT((oracle::parallel_sum_invertible(kTwoOne, identity(2)) - expected).norm(), 1e-14);
  EXPECT_LT((parallel_sum(f, g).matrix() - expected).norm(), 1e-13);
  EXPECT_LT((parallel_sum_variational(f, g).matrix() - expected).norm(), 1e-13);
  EXPECT_LT((parallel_sum_limit(f, g).value.matrix() - expected).norm(), 1e-6);
}

TEST(ParallelSum, InvertAndAddOracleOnRandomDefinitePairs) {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = rng.integer(2, 9);
    const Matrix f = random_psd(n, n, rng);
    const Matrix g = random_psd(n, n, rng);
    const Matrix expected = oracle::parallel_sum_invertible(f, g);
    EXPECT_LT((parallel_sum(make_psd(f), make_psd(g)).matrix() - expected).norm(), 1e-10);
  }
}

TEST(ParallelSum, VariationalValues) {
  const Vector e1 = oracle::vec({1, 0});
  const PsdOperator i = make_psd(identity(2));
  EXPECT_NEAR(detail::form_at(parallel_sum_variational(i, i).matrix(), e1), 0.5, 1e-14);
  const PsdOperator f = make_psd(kTwoOne);
  EXPECT_NEAR(detail::form_at(parallel_sum_variational(f, i).matrix(), e1), 0.6, 1e-14);
  const Vector h = oracle::vec({Scalar(0.3, -1.0), 2.0});
  EXPECT_NEAR(detail::form_at(parallel_sum_variational(make_psd(diag({1, 0})), make_psd(diag({0, 1}))).matrix(), h),
              0.0, 1e-14);
}

TEST(ParallelSum, VariationalIsTheInfimum) {
  // ((F:G)h,h) is the minimum over splittings h = f + g; sample the splitting
  // along a line through the optimum and check nothing beats it.
  const PsdOperator f = make_psd(kTwoOne);
  const PsdOperator g = make_psd(identity(2));
  const Vector h = oracle::vec({1, -2});
  const double value = detail::form_at(parallel_sum(f, g).matrix(), h);
  for (const Vector& dir : {oracle::vec({1, 0}), oracle::vec({0, 1})}) {
    const double best = oracle::minimize_1d(
        [&](double t) {
          const Vector part = t * dir + h / 2.0;
          return detail::form_at(f.matrix(), h - part) + detail::form_at(g.matrix(), part);
        },
        -10, 10);
    EXPECT_GE(best, value - 1e-10);
  }
}

TEST(ParallelSum, ProbeBasisDoesNotMatter) {
  Rng rng(8);
  const PsdOperator f = make_psd(random_psd(4, 2, rng));
  const PsdOperator g = make_psd(random_psd(4, 3, rng));
  const Matrix a = parallel_sum_variational(f, g).matrix();
  const Matrix b = parallel_sum_variational(f, g, random_unitary(4, rng)).matrix();
  EXPECT_LT((a - b).norm(), 1e-12);
}

TEST(ParallelSum, LimitExamples) {
  const PsdOperator i = make_psd(identity(2));
  const LimitResult half = parallel_sum_limit(i, i);
  EXPECT_LT((half.value.matrix() - identity(2) / 2.0).norm(), 1e-9);
  EXPECT_EQ(half.increments.size(), 9u);
  EXPECT_LE(half.last_increment, 1e-6);
}

TEST(ParallelSum, LimitRejectsBadSchedules) {
  const PsdOperator i = make_psd(identity(2));
  EXPECT_THROW(parallel_sum_limit(i, i, {0.1}), Error);
  EXPECT_THROW(parallel_sum_limit(i, i, {0.1, 0.2}), Error);
  EXPECT_THROW(parallel_sum_limit(i, i, {0.1, -0.2}), Error);
}

TEST(ParallelSum, LimitReportsNonConvergence) {
  // Eigenvalues of F + G below the end of the schedule: the iterates are still
  // moving at eps = 1e-10.
  const PsdOperator tiny = make_psd(1e-11 * identity(2));
  try {
    parallel_sum_limit(tiny, tiny);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotConverged);
  }
}

TEST(ParallelSum, OrderAndSymmetry) {
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const PsdPair pair = random_singular_pair(rng.integer(2, 10), rng);
    const PsdOperator f = make_psd(pair.first);
    const PsdOperator g = make_psd(pair.second);
    const Matrix fg = parallel_sum(f, g).matrix();
    const Matrix gf = parallel_sum(g, f).matrix();
    const double scale = f.norm() + g.norm();
    EXPECT_LT((fg - gf).norm(), 1e-10 * scale);
    EXPECT_TRUE(loewner_le(fg, f.matrix(), 1e-10 * scale));
    EXPECT_TRUE(loewner_le(fg, g.matrix(), 1e-10 * scale));
  }
}

TEST(ParallelSum, ThreeRoutesAgree) {
  Rng rng(100);
  for (int trial = 0; trial < 60; ++trial) {
    const Index n = rng.integer(2, 12);
    const PsdPair pair =
        rng.uniform() < 0.25 ? PsdPair{random_psd(n, n, rng), random_psd(n, n, rng), n} : random_singular_pair(n, rng);
    const PsdOperator f = make_psd(pair.first);
    const PsdOperator g = make_psd(pair.second);
    EXPECT_LE(parallel_routes_disagreement(f, g), 1e-6 * (f.norm() + g.norm())) << "trial " << trial;
  }
}

TEST(ParallelSum, RankEqualsRangeIntersection) {
  Rng rng(200);
  for (int trial = 0; trial < 100; ++trial) {
    const PsdPair pair = random_singular_pair(rng.integer(2, 10), rng);
    const PsdOperator f = make_psd(pair.first);
    const PsdOperator g = make_psd(pair.second);
    const PsdOperator fg = parallel_sum(f, g);
    const Index frames = intersection_dim(range_basis(f), range_basis(g));
    EXPECT_EQ(frames, pair.common) << "trial " << trial;
    EXPECT_EQ(fg.rank(), frames) << "trial " << trial;
    EXPECT_EQ(sqrt_psd(fg).rank(), frames) << "trial " << trial;
  }
}

TEST(ParallelSum, ZeroIffContractionIdempotentIffTrivialIntersection) {
  Rng rng(300);
  int zero_count = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = rng.integer(2, 10);
    const Index r1 = rng.integer(1, n - 1);
    const Index r2 = rng.integer(1, n - r1);
    const bool disjoint = rng.uniform() < 0.5;
    const Index common = disjoint ? 0 : rng.integer(0, std::min(r1, r2));
    const PsdPair pair = random_psd_pair(n, r1, r2, common, rng);
    const PsdOperator f = make_psd(pair.first);
    const PsdOperator g = make_psd(pair.second);
    const bool vanishes = parallel_sum(f, g).norm() <= vanish_tolerance(f.ctx()) * (f.norm() + g.norm());
    const Matrix m = parallel_contraction(f, g);
    const bool idempotent = (m * m - m).norm() <= 1e-7;
    const bool trivial = intersect_trivially(range_basis(f), range_basis(g));
    EXPECT_EQ(vanishes, idempotent) << "trial " << trial;
    EXPECT_EQ(vanishes, trivial) << "trial " << trial;
    EXPECT_EQ(trivial, common == 0) << "trial " << trial;
    zero_count += vanishes;
  }
  EXPECT_GT(zero_count, 20);
  EXPECT_LT(zero_count, 90);
}

TEST(Shorted, IdentityGivesProjection) {
  Rng rng(5);
  const Subspace k = random_subspace(5, 2, rng);
  const ShortReport report = shorted(make_psd(identity(5)), k);
  EXPECT_LT((report.shorted.matrix() - k.projection()).norm(), 1e-12);
  EXPECT_LT(report.route_disagreement, 1e-12);
  EXPECT_FALSE(report.vanishes);
  EXPECT_TRUE(report.range_condition);
}

TEST(Shorted, SchurComplementExample) {
  const PsdOperator b = make_psd(kTwoOne);
  const ShortReport report = shorted(b, Subspace::coordinate(2, {0}));
  EXPECT_LT((report.shorted.matrix() - diag({1, 0})).norm(), 1e-14);
  EXPECT_LT(report.route_disagreement, 1e-12);
  // min over t of (B(e1 + t e2), e1 + t e2)
  const double grid = oracle::minimize_1d(
      [&](double t) { return detail::form_at(b.matrix(), oracle::vec({1, t})); }, -10, 10);
  EXPECT_NEAR(grid, 1.0, 1e-10);
}

TEST(Shorted, GridOracleOnRandomTwoByTwo) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix b(2, 2);
    const double d1 = rng.uniform(0.5, 3.0);
    const double d2 = rng.uniform(0.5, 3.0);
    const double off = rng.uniform(-0.9, 0.9) * std::sqrt(d1 * d2);
    b << d1, off, off, d2;
    const ShortReport report = shorted(make_psd(b), Subspace::coordinate(2, {0}));
    const double grid = oracle::minimize_1d(
        [&](double t) { return detail::form_at(b, oracle::vec({1, t})); }, -20, 20);
    EXPECT_NEAR(std::real(report.shorted.matrix()(0, 0)), grid, 1e-9);
  }
}

TEST(Shorted, FullSubspaceLeavesOperatorUnchanged) {
  Rng rng(7);
  const PsdOperator b = make_psd(random_psd(4, 3, rng));
  const ShortReport report = shorted(b, Subspace::full(4));
  EXPECT_LT((report.shorted.matrix() - b.matrix()).norm(), 1e-12);
  EXPECT_LT(report.route_disagreement, 1e-10);
}

TEST(Shorted, TrivialSubspaceGivesZero) {
  Rng rng(7);
  const PsdOperator b = make_psd(random_psd(4, 4, rng));
  const ShortReport report = shorted(b, Subspace::trivial(4));
  EXPECT_EQ(report.shorted.matrix().norm(), 0.0);
  EXPECT_TRUE(report.vanishes);
}

TEST(Shorted, DimensionMismatch) {
  try {
    shorted(make_psd(identity(3)), Subspace::full(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(Shorted, RoutesAgreeAndInvariantsHold) {
  Rng rng(400);
  for (int trial = 0; trial < 60; ++trial) {
    const Index n = rng.integer(2, 12);
    const PsdOperator b = make_psd(random_psd(n, rng.integer(1, n), rng));
    const Subspace k = random_subspace(n, rng.integer(1, n - 1), rng);
    const ShortReport report = shorted(b, k);
    EXPECT_LE(report.route_disagreement, 1e-7 * b.norm()) << "trial " << trial;
    EXPECT_TRUE(report.range_condition);
    EXPECT_TRUE(loewner_le(report.shorted.matrix(), b.matrix(), b.ctx().cmp_tol * b.norm()));
    EXPECT_LE((report.shorted.matrix() - k.projection() * report.shorted.matrix()).norm(), 1e-10 * b.norm());
  }
}

TEST(Shorted, MaximalAmongFeasibleOperators) {
  Rng rng(500);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = rng.integer(3, 8);
    const PsdOperator b = make_psd(random_psd(n, rng.integer(2, n), rng));
    const Subspace k = random_subspace(n, rng.integer(1, n - 1), rng);
    const Matrix short_k = shorted(b, k).shorted.matrix();
    const Subspace omega = omega_subspace(b, k);
    const Matrix half = sqrt_psd(b).matrix();
    for (int sample = 0; sample < 20; ++sample) {
      const Index dim = rng.integer(0, omega.dim());
      const Matrix q = dim ? Subspace::from_orthonormal(omega.frame() * random_unitary(omega.dim(), rng).leftCols(dim))
                                 .projection()
                           : Matrix::Zero(n, n);
      const Matrix z = half * q * half;
      EXPECT_LE((z - k.projection() * z).norm(), 1e-10 * b.norm());
      EXPECT_TRUE(loewner_le(z, b.matrix(), 1e-10 * b.norm()));
      EXPECT_TRUE(loewner_le(z, short_k, 1e-7 * b.norm()));
    }
  }
}

TEST(Gamma, BlockDiagonalHasNoCoupling) {
  const PsdOperator b = make_psd(diag({2, 3, 5}));
  const GammaReport report = gamma_form(b, Subspace::coordinate(3, {0}));
  EXPECT_LT(report.gamma_norm, 1e-15);
  EXPECT_LT((report.short_k - diag({2, 0, 0})).norm(), 1e-14);
  EXPECT_LT((report.short_k_perp - diag({0, 3, 5})).norm(), 1e-14);
  EXPECT_LT(report.cross_check, 1e-13);
}

TEST(Gamma, RankOneCouplingIsUnitary) {
  const PsdOperator b = make_psd(oracle::outer(oracle::vec({1, 1})) / 2.0);
  const GammaReport report = gamma_form(b, Subspace::coordinate(2, {0}));
  EXPECT_NEAR(report.gamma_norm, 1.0, 1e-12);
  EXPECT_TRUE(report.contraction);
  EXPECT_LT(report.short_k.norm(), 1e-12);
  EXPECT_LT(report.short_k_perp.norm(), 1e-12);
  EXPECT_LT(report.cross_check, 1e-12);
}

TEST(Gamma, SchurExample) {
  const GammaReport report = gamma_form(make_psd(kTwoOne), Subspace::coordinate(2, {0}));
  EXPECT_NEAR(report.gamma_norm, 1.0 / std::sqrt(2.0), 1e-14);
  EXPECT_LT((report.short_k - diag({1, 0})).norm(), 1e-14);
  EXPECT_LT((report.short_k_perp - diag({0, 0.5})).norm(), 1e-14);
  EXPECT_LT(report.cross_check, 1e-13);
}

TEST(Gamma, RandomContractions) {
  Rng rng(600);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = rng.integer(2, 10);
    const PsdOperator b = make_psd(random_psd(n, rng.integer(1, n), rng));
    const GammaReport report = gamma_form(b, random_subspace(n, rng.integer(1, n - 1), rng));
    EXPECT_TRUE(report.contraction) << report.gamma_norm;
    EXPECT_LT(report.cross_check, 1e-7 * b.norm());
  }
}

TEST(TrivialIntersection, Examples) {
  const IntersectionTest disjoint = trivial_intersection(make_psd(diag({1, 0})), Subspace::coordinate(2, {1}));
  EXPECT_TRUE(disjoint.trivial);
  EXPECT_TRUE(disjoint.consistent);

  const IntersectionTest meets = trivial_intersection(make_psd(identity(2)), Subspace::coordinate(2, {0}));
  EXPECT_FALSE(meets.trivial);
  EXPECT_EQ(meets.frame_intersection, 1);
  EXPECT_TRUE(meets.consistent);
}

TEST(TrivialIntersection, SingularWitnessInC4) {
  const PsdOperator b = make_psd(oracle::outer(oracle::vec({1, 0, 1, 0})) / 2.0);
  const Subspace k = Subspace::coordinate(4, {0, 1});
  const IntersectionTest on_k = trivial_intersection(b, k);
  const IntersectionTest on_complement = trivial_intersection(b, k.complement());
  EXPECT_TRUE(on_k.trivial);
  EXPECT_TRUE(on_k.consistent);
  EXPECT_EQ(on_k.frame_intersection, 0);
  EXPECT_TRUE(on_complement.trivial);
  EXPECT_TRUE(on_complement.consistent);
  EXPECT_EQ(on_complement.frame_intersection, 0);
}

TEST(TrivialIntersection, DetectorMatchesFramesOnRandomInstances) {
  Rng rng(700);
  for (int trial = 0; trial < 80; ++trial) {
    const Index n = rng.integer(2, 10);
    const Index rank = rng.integer(1, n - 1);
    const Index k_dim = rng.integer(1, n - rank);
    const Index common = rng.uniform() < 0.5 ? 0 : rng.integer(0, std::min(rank, k_dim));
    const SubspacePair spaces = random_subspace_pair(n, rank, k_dim, common, rng);
    const PsdOperator b = make_psd(random_psd_on(spaces.first, rng));
    const IntersectionTest test = trivial_intersection(b, spaces.second);
    EXPECT_TRUE(test.consistent) << "trial " << trial;
    EXPECT_EQ(test.frame_intersection, common) << "trial " << trial;
  }
}

TEST(Omega, RangeOfShortedOperatorSquareRoot) {
  const Vector v = oracle::vec({1, 1, 0});
  const PsdOperator b = make_psd(identity(3) + oracle::outer(v));
  const Subspace k = span_of({oracle::vec({1, 0, 0}), oracle::vec({0, 0, 1})}, 3);
  const Subspace omega = omega_subspace(b, k);
  EXPECT_EQ(omega.dim(), 2);
  const Matrix short_k = shorted(b, k).shorted.matrix();
  EXPECT_TRUE(same_subspace(image(sqrt_psd(b).matrix(), omega), range_basis(make_psd(short_k))));
}
