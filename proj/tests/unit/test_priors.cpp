#include <gtest/gtest.h>

#include <random>

#include <cmath>
#include <numbers>

#include "bayesrank/errors.hpp"
#include "bayesrank/priors.hpp"

using namespace bayesrank;

namespace {

// Independent scalar routine: log N(x; 0, v).
double log_normal(double x, double v) {
  return -0.5 * std::log(2.0 * std::numbers::pi * v) - x * x / (2.0 * v);
}

FactorState scalar_state(double m, double n, double g) {
  FactorState s;
  s.M = Matrix::Constant(1, 1, m);
  s.N = Matrix::Constant(1, 1, n);
  s.gamma = Vector::Constant(1, g);
  return s;
}

}  // namespace

TEST(LogPriorGivenGamma, ScalarStandardNormal) {
  EXPECT_NEAR(log_prior_given_gamma(scalar_state(1.0, 0.0, 1.0)),
              -0.5 - std::log(2.0 * std::numbers::pi), 1e-14);
}

TEST(LogPriorGivenGamma, ZeroFactorsLeaveNormalizer) {
  FactorState s;
  s.M = Matrix::Zero(3, 2);
  s.N = Matrix::Zero(4, 2);
  s.gamma = Vector(2);
  s.gamma << 0.3, 2.5;
  const double expected = -(3.0 + 4.0) / 2.0 *
                          (std::log(2.0 * std::numbers::pi * 0.3) +
                           std::log(2.0 * std::numbers::pi * 2.5));
  EXPECT_NEAR(log_prior_given_gamma(s), expected, 1e-12);
}

TEST(LogPriorGivenGamma, MatchesPerEntryOracle) {
  Rng rng(11);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    FactorState s;
    s.M = Matrix(2, 2);
    s.N = Matrix(1, 2);
    s.gamma = Vector(2);
    for (int j = 0; j < 2; ++j) {
      s.gamma(j) = 0.1 + std::abs(z(rng));
      s.M(0, j) = z(rng);
      s.M(1, j) = z(rng);
      s.N(0, j) = z(rng);
    }
    double oracle = 0.0;
    for (int j = 0; j < 2; ++j) {
      oracle += log_normal(s.M(0, j), s.gamma(j)) + log_normal(s.M(1, j), s.gamma(j)) +
                log_normal(s.N(0, j), s.gamma(j));
    }
    EXPECT_NEAR(log_prior_given_gamma(s), oracle, 1e-12 * std::max(1.0, std::abs(oracle)));
  }
}

TEST(LogPriorGivenGamma, RejectsNonpositiveGamma) {
  EXPECT_THROW(log_prior_given_gamma(scalar_state(1.0, 1.0, 0.0)), DomainError);
  EXPECT_THROW(log_prior_given_gamma(scalar_state(1.0, 1.0, -1.0)), DomainError);
}

TEST(LogPriorGivenGamma, IntegratesToOne) {
  // p = m = k = 1: the density factorizes, so a 1-D midpoint rule over
  // [-10 sqrt(g), 10 sqrt(g)] squared checks the normalization.
  const double g = 0.7;
  const int n = 4000;
  const double lo = -10.0 * std::sqrt(g), h = 20.0 * std::sqrt(g) / n;
  double one_d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = lo + (i + 0.5) * h;
    one_d += std::exp(log_prior_given_gamma(scalar_state(x, 0.0, g)) -
                      log_normal(0.0, g)) * h;
  }
  EXPECT_NEAR(one_d * one_d, 1.0, 1e-6);
}

TEST(LogPriorGamma, Examples) {
  EXPECT_NEAR(log_prior_gamma(Vector::Constant(1, 1.0), 1.0, 1.0), -1.0, 1e-15);
  const double one = log_prior_gamma(Vector::Constant(1, 0.4), 1.7, 0.9);
  EXPECT_DOUBLE_EQ(log_prior_gamma(Vector::Constant(2, 0.4), 1.7, 0.9), 2.0 * one);
  // 50-digit reference: 2.5 ln 0.3 - lnGamma(2.5) - 3.5 ln 0.7 - 0.3 / 0.7
  EXPECT_NEAR(log_prior_gamma(Vector::Constant(1, 0.7), 2.5, 0.3), -2.474824006073624386,
              1e-12 * 2.474824006073624386);
}

TEST(LogPriorGamma, SumOfColumns) {
  Vector g(4);
  g << 0.2, 1.3, 4.0, 0.05;
  double sum = 0.0;
  for (int j = 0; j < 4; ++j) sum += log_prior_gamma(Vector::Constant(1, g(j)), 3.0, 0.5);
  EXPECT_NEAR(log_prior_gamma(g, 3.0, 0.5), sum, 1e-12);
}

TEST(LogPriorGamma, DomainErrors) {
  EXPECT_THROW(log_prior_gamma(Vector::Constant(1, 0.0), 1.0, 1.0), DomainError);
  EXPECT_THROW(log_prior_gamma(Vector::Constant(1, 1.0), 0.0, 1.0), DomainError);
  EXPECT_THROW(log_prior_gamma(Vector::Constant(1, 1.0), 1.0, -1.0), DomainError);
}

TEST(ValidatePrior, RejectsBadSpecs) {
  EXPECT_THROW(validate_prior(FixedPrior{Vector::Constant(2, 0.0), Vector::Ones(2)}, 2),
               DomainError);
  EXPECT_THROW(validate_prior(FixedPrior{Vector::Ones(3), Vector::Ones(3)}, 2),
               DimensionError);
  EXPECT_THROW(validate_prior(GammaHierPrior{0.0, 1.0}, 2), DomainError);
  EXPECT_NO_THROW(validate_prior(GammaHierPrior{1.0, 1.0}, 2));
}

TEST(SamplePrior, GammaHierInversesHaveGammaMean) {
  Rng rng(12);
  const Dims dims{1, 1, 1, 1};
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += 1.0 / sample_prior(GammaHierPrior{3.0, 2.0}, dims, rng).gamma(0);
  EXPECT_NEAR(sum / n, 1.5, 0.02);
}

TEST(SamplePrior, FixedColumnVariance) {
  Rng rng(13);
  Vector var_m(2), var_n(2);
  var_m << 4.0, 1.0;
  var_n << 1.0, 1.0;
  const FactorState s = sample_prior(FixedPrior{var_m, var_n}, Dims{1, 10000, 2, 2}, rng);
  const double mean = s.M.col(0).mean();
  const double var = (s.M.col(0).array() - mean).square().sum() / (s.M.rows() - 1);
  EXPECT_NEAR(var, 4.0, 0.1);
  EXPECT_EQ(s.gamma.size(), 0);
}

TEST(SamplePrior, ColumnNormsScaleWithGamma) {
  // E[|M_j|^2 | gamma_j] = p gamma_j: the ratio averages to 1 over paired draws.
  Rng rng(14);
  const Dims dims{1, 20, 3, 3};
  double ratio = 0.0;
  const int n = 5000;
  for (int i = 0; i < n; ++i) {
    const FactorState s = sample_prior(GammaHierPrior{2.0, 1.0}, dims, rng);
    for (int j = 0; j < 3; ++j) ratio += s.M.col(j).squaredNorm() / (20.0 * s.gamma(j));
  }
  // each ratio is chi2_20 / 20 with sd sqrt(0.1); 15000 of them
  EXPECT_NEAR(ratio / (3.0 * n), 1.0, 0.01);
}

TEST(TheoremHyperparams, Examples) {
  const auto unit = theorem_hyperparams(1.0, 1, 1, 1, 1);
  EXPECT_DOUBLE_EQ(unit.a, 1.0);
  EXPECT_DOUBLE_EQ(unit.b, 0.25);
  EXPECT_DOUBLE_EQ(unit.lambda, 0.25);
  const auto h = theorem_hyperparams(1.0, 10, 2, 2, 2);
  EXPECT_DOUBLE_EQ(h.b, 1.0 / 1280.0);
  EXPECT_DOUBLE_EQ(h.lambda, 0.25);
  const auto h2 = theorem_hyperparams(2.0, 10, 2, 2, 2);
  EXPECT_DOUBLE_EQ(h2.b, 2.0 * h.b);
  EXPECT_DOUBLE_EQ(h2.lambda, 0.5 * h.lambda);
  EXPECT_THROW(theorem_hyperparams(0.0, 1, 1, 1, 1), DomainError);
}

TEST(Precisions, FollowPrior) {
  FactorState s = scalar_state(0.0, 0.0, 0.25);
  EXPECT_DOUBLE_EQ(prior_precision_m(s, GammaHierPrior{1.0, 1.0})(0), 4.0);
  EXPECT_DOUBLE_EQ(prior_precision_n(s, GammaHierPrior{1.0, 1.0})(0), 4.0);
  const FixedPrior f{Vector::Constant(1, 2.0), Vector::Constant(1, 0.5)};
  EXPECT_DOUBLE_EQ(prior_precision_m(s, f)(0), 0.5);
  EXPECT_DOUBLE_EQ(prior_precision_n(s, f)(0), 2.0);
}
