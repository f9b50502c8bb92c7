#include <gtest/gtest.h>

#include <Eigen/SVD>

#include <cmath>

#include "bayesrank/baseline.hpp"
#include "bayesrank/errors.hpp"

using namespace bayesrank;

namespace {

Matrix gaussian(int r, int c, Rng& rng) {
  return gen_design(r, c, {DesignKind::kGaussianIid, 1.0}, rng);
}

}  // namespace

TEST(OlsFit, IdentityDesign) {
  Rng rng(1);
  const Matrix Y = gaussian(3, 2, rng);
  EXPECT_TRUE(ols_fit(Matrix::Identity(3, 3), Y).isApprox(Y, 1e-14));
}

TEST(OlsFit, ExactRecovery) {
  Rng rng(2);
  const Matrix X = gaussian(8, 3, rng);
  const Matrix B0 = gaussian(3, 2, rng);
  EXPECT_LE((ols_fit(X, X * B0) - B0).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(OlsFit, NormalEquations) {
  Rng rng(3);
  const Matrix X = gaussian(6, 3, rng);
  const Matrix Y = gaussian(6, 2, rng);
  const Matrix B = ols_fit(X, Y);
  EXPECT_LE((X.transpose() * X * B - X.transpose() * Y).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((X.transpose() * (Y - X * B)).norm(), 1e-8 * (X.transpose() * Y).norm());
}

TEST(OlsFit, RankDeficientDesignGivesMinimumNorm) {
  Rng rng(4);
  Matrix X = gaussian(6, 3, rng);
  X.col(2) = X.col(0) + X.col(1);
  const Matrix Y = gaussian(6, 2, rng);
  const Matrix B = ols_fit(X, Y);
  EXPECT_LE((X.transpose() * (Y - X * B)).norm(), 1e-8 * (X.transpose() * Y).norm());
  // Minimum norm: B is orthogonal to the null space direction (1, 1, -1).
  Vector null(3);
  null << 1, 1, -1;
  EXPECT_LE((null.transpose() * B).norm(), 1e-10);
}

TEST(ReducedRankFit, EdgeRanks) {
  Rng rng(5);
  const Matrix X = gaussian(7, 4, rng);
  const Matrix Y = gaussian(7, 3, rng);
  EXPECT_TRUE(reduced_rank_fit(X, Y, 3).b_hat.isApprox(ols_fit(X, Y), 1e-10));
  EXPECT_TRUE(reduced_rank_fit(X, Y, 10).b_hat.isApprox(ols_fit(X, Y), 1e-10));
  EXPECT_EQ(reduced_rank_fit(X, Y, 0).b_hat.squaredNorm(), 0.0);
  EXPECT_THROW(reduced_rank_fit(X, Y, -1), DomainError);
}

TEST(ReducedRankFit, EckartYoungOracle) {
  // X = I4 and Y of exact rank 2: the rank-r fit is the SVD truncation of Y.
  Rng rng(6);
  const Matrix Y = gaussian(4, 2, rng) * gaussian(2, 4, rng);
  const Matrix X = Matrix::Identity(4, 4);
  EXPECT_LE((Y - reduced_rank_fit(X, Y, 2).b_hat).squaredNorm(), 1e-20 * Y.squaredNorm());
  Eigen::JacobiSVD<Matrix> svd(Y);
  const double sigma2 = svd.singularValues()(1);
  const double err1 = (Y - reduced_rank_fit(X, Y, 1).b_hat).squaredNorm();
  EXPECT_GT(err1, 0.0);
  EXPECT_NEAR(err1, sigma2 * sigma2, 1e-10 * sigma2 * sigma2);
}

TEST(ReducedRankFit, ObjectiveNonincreasingAndRankBounded) {
  Rng rng(7);
  const Matrix X = gaussian(12, 5, rng);
  const Matrix Y = gaussian(12, 4, rng);
  double prev = std::numeric_limits<double>::infinity();
  for (int r = 0; r <= 4; ++r) {
    const auto fit = reduced_rank_fit(X, Y, r);
    EXPECT_LE(fit.penalized_objective, prev * (1 + 1e-12));
    EXPECT_LE(numerical_rank(fit.b_hat, 1e-10), fit.rank_used);
    prev = fit.penalized_objective;
  }
}

TEST(ReducedRankFit, NoiselessRecovery) {
  Rng rng(8);
  const Matrix X = gen_design(30, 6, {DesignKind::kScaledBounded, 1.0}, rng);
  const auto truth = gen_lowrank(6, 5, 2, 1.0, rng);
  const Matrix Y = X * truth.B;
  EXPECT_LE((X * (reduced_rank_fit(X, Y, 2).b_hat - truth.B)).squaredNorm(), 1e-8);
}

TEST(RankPenalizedSelect, ZeroAndHugePenalty) {
  Rng rng(9);
  const Matrix X = gaussian(10, 4, rng);
  const Matrix Y = gaussian(10, 3, rng);
  const auto zero = rank_penalized_select(X, Y, 0.0);
  EXPECT_EQ(zero.rank_used, 3);
  EXPECT_TRUE(zero.b_hat.isApprox(ols_fit(X, Y), 1e-10));
  const auto huge = rank_penalized_select(X, Y, 1e12);
  EXPECT_EQ(huge.rank_used, 0);
  EXPECT_EQ(huge.b_hat.squaredNorm(), 0.0);
  EXPECT_THROW(rank_penalized_select(X, Y, -1.0), DomainError);
}

TEST(RankPenalizedSelect, TiesGoToSmallerRank) {
  // Y = 0: every rank fits perfectly, so pen = 0 ties everywhere.
  Rng rng(10);
  const Matrix X = gaussian(6, 3, rng);
  EXPECT_EQ(rank_penalized_select(X, Matrix::Zero(6, 3), 0.0).rank_used, 0);
}

TEST(RankPenalizedSelect, NoiselessRankTwoAndRescan) {
  Rng rng(11);
  const Matrix X = gaussian(20, 5, rng);
  const auto truth = gen_lowrank(5, 5, 2, 1.0, rng);
  const Matrix Y = X * truth.B;
  const auto fit = rank_penalized_select(X, Y, 1e-3);
  EXPECT_EQ(fit.rank_used, 2);

  const Matrix Yn = Y + 0.3 * gaussian(20, 5, rng);
  const double pen = 1.7;
  const auto sel = rank_penalized_select(X, Yn, pen);
  for (int r = 0; r <= 5; ++r) {
    const double obj = reduced_rank_fit(X, Yn, r).penalized_objective + pen * r;
    EXPECT_LE(sel.penalized_objective, obj + 1e-10);
  }
}

TEST(DefaultRankPenalty, Formula) {
  Rng rng(12);
  const Matrix X = gaussian(10, 4, rng);
  EXPECT_NEAR(default_rank_penalty(X, 6, 0.5), 2 * 0.5 * (4 + 6) * std::log(10.0 * 6),
              1e-12);
}
