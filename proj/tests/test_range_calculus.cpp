#include <gtest/gtest.h>

#include "oracles.hpp"
#include "oprange/random.hpp"
#include "oprange/range.hpp"

using namespace oprange;
using oracle::diag;

namespace {

bool douglas_succeeds(const Matrix& a, const Matrix& b) {
  try {
    douglas_solve(a, b);
    return true;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoFactorization) throw;
    return false;
  }
}

// B of shape n x m with prescribed rank, as a product of Gaussian factors.
Matrix random_rank_deficient(Index n, Index m, Index rank, Rng& rng) {
  return random_gaussian(n, rank, rng) * random_gaussian(rank, m, rng);
}

}  // namespace

TEST(Douglas, EqualArgumentsGiveRangeProjectionOfAdjoint) {
  Rng rng(11);
  const Matrix b = random_rank_deficient(4, 4, 2, rng);
  const DouglasFactor d = douglas_solve(b, b);
  const Matrix projection = column_space(b.adjoint()).projection();
  EXPECT_LT((d.factor - projection).norm(), 1e-10);
  EXPECT_TRUE(d.range_in_adjoint);
  EXPECT_TRUE(d.kernels_match);
}

TEST(Douglas, DiagonalExampleMatchesLeastSquares) {
  const Matrix b = diag({2, 0});
  const Matrix a = diag({4, 0});
  const DouglasFactor d = douglas_solve(a, b);
  EXPECT_LT((d.factor - diag({2, 0})).norm(), 1e-14);
  EXPECT_LT((d.factor - oracle::least_squares(b, a)).norm(), 1e-12);
  EXPECT_NEAR(d.lambda, 4.0, 1e-12);
  EXPECT_TRUE(d.kernels_match);
}

TEST(Douglas, RangeNotContainedFails) {
  const Matrix b = diag({1, 0});
  const Matrix a = oracle::outer(oracle::vec({0, 1}));
  EXPECT_FALSE(douglas_succeeds(a, b));
  try {
    douglas_solve(a, b);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoFactorization);
  }
}

TEST(Douglas, ZeroLeftSideUsesAbsoluteFloor) {
  const Matrix b = diag({1, 0});
  const DouglasFactor d = douglas_solve(Matrix::Zero(2, 2), b);
  EXPECT_EQ(d.factor.norm(), 0.0);
}

TEST(Douglas, RowMismatchIsRejected) {
  EXPECT_THROW(douglas_solve(Matrix::Zero(3, 2), Matrix::Zero(2, 2)), Error);
}

TEST(Douglas, RandomRoundTrip) {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = rng.integer(2, 12);
    const Index m = rng.integer(2, 12);
    const Index rank = rng.integer(1, std::min(n, m));
    const Matrix b = random_rank_deficient(n, m, rank, rng);
    const Matrix c0 = random_gaussian(m, rng.integer(1, 8), rng);
    const Matrix a = b * c0;
    const DouglasFactor d = douglas_solve(a, b);
    EXPECT_LE((b * d.factor - a).norm(), 1e-8 * std::max(1.0, a.norm())) << "trial " << trial;
    EXPECT_TRUE(d.range_in_adjoint) << "trial " << trial;
    EXPECT_TRUE(d.kernels_match) << "trial " << trial;
    // The minimal factor is the least-squares minimum-norm solution.
    EXPECT_LE((d.factor - oracle::least_squares(b, a)).norm(), 1e-7 * std::max(1.0, d.factor.norm()));
  }
}

TEST(Douglas, LambdaIsTheLeastMajorant) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = rng.integer(2, 8);
    const Matrix b = random_rank_deficient(n, n, rng.integer(1, n), rng);
    const Matrix a = b * random_gaussian(n, n, rng);
    const DouglasFactor d = douglas_solve(a, b);
    EXPECT_TRUE(majorized(a, b, d.lambda));
    EXPECT_FALSE(majorized(a, b, 0.99 * d.lambda, 0.0));
  }
}

TEST(RangeInclusion, Examples) {
  const PsdOperator b = make_psd(diag({3, 1, 0}));
  const RangeInclusion same = range_inclusion(b, b);
  EXPECT_TRUE(same.included);
  EXPECT_NEAR(same.lambda, 1.0, 1e-12);

  const RangeInclusion disjoint = range_inclusion(make_psd(diag({1, 0})), make_psd(diag({0, 1})));
  EXPECT_FALSE(disjoint.included);
  EXPECT_TRUE(std::isinf(disjoint.lambda));

  const RangeInclusion scaled = range_inclusion(make_psd(diag({2, 0})), make_psd(diag({1, 0})));
  EXPECT_TRUE(scaled.included);
  EXPECT_NEAR(scaled.lambda, 4.0, 1e-12);
}

TEST(RangeInclusion, ThreeStatementsAgreeOnRandomPairs) {
  Rng rng(77);
  int included_count = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = rng.integer(2, 10);
    const Matrix b = random_rank_deficient(n, n, rng.integer(1, n), rng);
    Matrix a;
    if (rng.uniform() < 0.5) a = b * random_gaussian(n, n, rng);
    else a = random_rank_deficient(n, n, rng.integer(1, n), rng);
    const RangeInclusion inc = range_inclusion(a, b);
    const bool factors = douglas_succeeds(a, b);
    EXPECT_EQ(inc.included, factors) << "trial " << trial;
    EXPECT_EQ(inc.included, majorized(a, b, inc.lambda)) << "trial " << trial;
    included_count += inc.included;
  }
  EXPECT_GT(included_count, 50);
  EXPECT_LT(included_count, 200);
}

TEST(RangeInclusion, PsdAndMatrixFormsAgree) {
  Rng rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const PsdPair pair = random_singular_pair(6, rng);
    const PsdOperator f = make_psd(pair.first);
    const PsdOperator g = make_psd(pair.second);
    const RangeInclusion psd_form = range_inclusion(f, g);
    const RangeInclusion matrix_form = range_inclusion(f.matrix(), g.matrix());
    EXPECT_EQ(psd_form.included, matrix_form.included);
    if (psd_form.included) {
      EXPECT_NEAR(psd_form.lambda, matrix_form.lambda, 1e-8 * matrix_form.lambda);
    }
  }
}

TEST(RangeSum, Examples) {
  const RangeSumReport split = range_sum_identity_check({make_psd(diag({1, 0})), make_psd(diag({0, 1}))});
  EXPECT_EQ(split.rank_of_sum, 2);
  EXPECT_EQ(split.rank_of_span, 2);
  EXPECT_TRUE(split.pass);

  const PsdOperator p = make_psd(diag({1, 1, 0, 0}));
  const RangeSumReport doubled = range_sum_identity_check({p, p});
  EXPECT_EQ(doubled.rank_of_sum, 2);
  EXPECT_TRUE(doubled.pass);
}

TEST(RangeSum, RankOneTermsInC4) {
  Rng rng(9);
  std::vector<PsdOperator> terms;
  Matrix directions(4, 5);
  for (Index k = 0; k < 5; ++k) {
    directions.col(k) = random_gaussian(4, 1, rng);
    terms.push_back(make_psd(oracle::outer(directions.col(k))));
  }
  const RangeSumReport report = range_sum_identity_check(terms);
  EXPECT_EQ(report.rank_of_sum, oracle::rank(directions));
  EXPECT_EQ(report.rank_of_sum, 4);
  EXPECT_TRUE(report.pass);
}

TEST(RangeSum, EmptyListIsAnError) {
  try {
    range_sum_identity_check({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyList);
  }
}

TEST(RangeSum, RandomInstances) {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = rng.integer(2, 16);
    std::vector<PsdOperator> terms;
    const int count = static_cast<int>(rng.integer(1, 5));
    for (int k = 0; k < count; ++k) terms.push_back(make_psd(random_psd(n, rng.integer(0, n / 2 + 1), rng)));
    EXPECT_TRUE(range_sum_identity_check(terms).pass) << "trial " << trial;
  }
}

TEST(Sandwich, Examples) {
  const PsdOperator f = make_psd(diag({1, 4}));
  const PsdOperator m = make_psd(oracle::outer(oracle::vec({1, 1})) / 2.0);
  const SandwichReport report = sandwich_range_check(f, m);
  EXPECT_TRUE(report.pass);
  ASSERT_EQ(report.left.dim(), 1);
  const Vector expected = oracle::vec({1, 2}) / std::sqrt(5.0);
  EXPECT_TRUE(contains_vector(report.left, expected));
  EXPECT_TRUE(contains_vector(report.right, expected));

  Rng rng(4);
  const PsdOperator singular = make_psd(random_psd(5, 3, rng));
  const SandwichReport with_identity = sandwich_range_check(singular, make_psd(identity(5)));
  EXPECT_TRUE(with_identity.pass);
  EXPECT_TRUE(same_subspace(with_identity.left, range_basis(singular)));
  const SandwichReport identity_outside = sandwich_range_check(make_psd(identity(5)), singular);
  EXPECT_TRUE(identity_outside.pass);
  EXPECT_TRUE(same_subspace(identity_outside.left, range_basis(singular)));
}

TEST(Sandwich, RandomInstances) {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = rng.integer(2, 16);
    const PsdOperator f = make_psd(random_psd(n, rng.integer(1, n), rng));
    const PsdOperator m = make_psd(random_psd(n, rng.integer(1, n), rng));
    const SandwichReport report = sandwich_range_check(f, m);
    EXPECT_TRUE(report.pass) << "trial " << trial << " angle " << report.max_angle;
  }
}
