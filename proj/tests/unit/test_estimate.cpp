#include <gtest/gtest.h>

#include <cmath>

#include "bayesrank/errors.hpp"
#include "bayesrank/estimate.hpp"

using namespace bayesrank;

TEST(PredictionRisk, Examples) {
  Rng rng(1);
  const Matrix B = gen_design(3, 2, {DesignKind::kGaussianIid, 1.0}, rng);
  const Matrix X = gen_design(5, 3, {DesignKind::kGaussianIid, 1.0}, rng);
  EXPECT_EQ(prediction_risk(B, B, X), 0.0);
  const Matrix other = B + Matrix::Constant(3, 2, 0.3);
  EXPECT_DOUBLE_EQ(prediction_risk(other, B, Matrix::Identity(3, 3)),
                   frobenius_sq(other - B));
  Matrix X2(2, 2);
  X2 << 1, 0, 0, 2;
  EXPECT_DOUBLE_EQ(prediction_risk(Matrix::Ones(2, 1), Matrix::Zero(2, 1), X2), 5.0);
  EXPECT_THROW(prediction_risk(Matrix::Ones(2, 1), Matrix::Zero(2, 2), X2), DimensionError);
}

TEST(PredictionRisk, ZeroExactlyWhenDifferenceIsInNullSpace) {
  Matrix X(2, 3);
  X << 1, 0, 0, 0, 1, 0;
  Matrix d = Matrix::Zero(3, 2);
  d(2, 0) = 4.0;
  EXPECT_EQ(prediction_risk(d, Matrix::Zero(3, 2), X), 0.0);
  d(1, 1) = 1e-3;
  EXPECT_GT(prediction_risk(d, Matrix::Zero(3, 2), X), 0.0);
}

TEST(CompletionRisk, Examples) {
  Matrix t(2, 2);
  t << 1, 2, 3, 4;
  EXPECT_EQ(completion_risk(t, t), 0.0);
  Matrix h = t;
  h(1, 0) += 0.5;
  const std::vector<Entry> mask{{0, 0}, {1, 0}};
  EXPECT_DOUBLE_EQ(completion_risk(h, t, mask), 0.25);
  h(0, 1) -= 1.0;
  EXPECT_DOUBLE_EQ(completion_risk(h, t), frobenius_sq(h - t));
  EXPECT_DOUBLE_EQ(completion_risk(h, t, mask), 0.25);
}

TEST(EffectiveRank, Examples) {
  EXPECT_EQ(effective_rank(Matrix::Identity(4, 4), 0.5), 4);
  const Matrix outer = Vector::LinSpaced(5, 1, 5) * Vector::LinSpaced(3, -1, 1).transpose();
  EXPECT_EQ(effective_rank(outer, 1e-6), 1);
  Vector d(3);
  d << 1.0, 0.5, 1e-9;
  EXPECT_EQ(effective_rank(Matrix(d.asDiagonal()), 1e-3), 2);
  EXPECT_EQ(effective_rank(Matrix::Zero(3, 3), 0.1), 0);
  EXPECT_THROW(effective_rank(outer, 0.0), DomainError);
  EXPECT_THROW(effective_rank(outer, 1.0), DomainError);
}

TEST(EffectiveRank, ScaleInvariant) {
  Rng rng(2);
  const Matrix a = gen_design(6, 5, {DesignKind::kGaussianIid, 1.0}, rng) *
                   Vector::LinSpaced(5, 1.0, 1e-4).asDiagonal();
  const int r = effective_rank(a, 1e-2);
  for (double s : {1e-6, 0.3, 7.0, 1e8}) EXPECT_EQ(effective_rank(s * a, 1e-2), r);
}

namespace {

Scenario small_scenario(const std::string& id, int reps) {
  Scenario s;
  s.id = id;
  s.dims = {20, 4, 4, 4};
  s.k0 = 1;
  s.noise = NoiseSpec::gaussian(0.5);
  s.prior = GammaHierPrior{1.0, 0.01};
  s.sampler.lambda = 1.0 / (4 * 0.5);
  s.sampler.iters = 120;
  s.reps = reps;
  return s;
}

}  // namespace

TEST(Scenario, Validation) {
  Scenario s = small_scenario("a", 2);
  EXPECT_NO_THROW(s.validate());
  s.reps = 1;
  EXPECT_THROW(s.validate(), ConfigError);
  s = small_scenario("a", 2);
  s.k0 = 5;
  EXPECT_THROW(s.validate(), ConfigError);
  s = small_scenario("", 2);
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(MonteCarloRisk, NoiselessLargeLambdaIsNearlyExact) {
  Scenario s = small_scenario("noiseless", 2);
  s.noise = NoiseSpec::gaussian(1e-12);
  s.sampler.lambda = 1e4;
  s.sampler.iters = 400;
  const auto fixture = make_fixture(s, 3);
  const double signal = (fixture.X * fixture.truth.B).squaredNorm();
  const auto mc = monte_carlo_risk(s, 3);
  EXPECT_LE(mc.mean, 1e-3 * signal);
}

TEST(MonteCarloRisk, IdenticalSeedsGiveZeroStdError) {
  const Scenario s = small_scenario("same", 2);
  MonteCarloOptions options;
  options.rep_seed = [](int) { return std::uint64_t{42}; };
  const auto mc = monte_carlo_risk(s, 1, options);
  EXPECT_EQ(mc.risks[0], mc.risks[1]);
  EXPECT_EQ(mc.std_error, 0.0);
}

TEST(MonteCarloRisk, ParallelismDoesNotChangeResults) {
  const Scenario s = small_scenario("par", 6);
  MonteCarloOptions one, four;
  four.parallelism = 4;
  const auto a = monte_carlo_risk(s, 9, one);
  const auto b = monte_carlo_risk(s, 9, four);
  ASSERT_EQ(a.risks.size(), 6u);
  for (std::size_t i = 0; i < a.risks.size(); ++i) EXPECT_EQ(a.risks[i], b.risks[i]);
  EXPECT_EQ(a.mean, b.mean);
}

TEST(MonteCarloRisk, PermutingReplicationsKeepsMean) {
  const Scenario s = small_scenario("perm", 6);
  MonteCarloOptions reversed;
  reversed.rep_seed = [](int rep) { return stream_seed(9, "perm", 6 - rep); };
  const auto a = monte_carlo_risk(s, 9);
  const auto b = monte_carlo_risk(s, 9, reversed);
  EXPECT_NEAR(a.mean, b.mean, 1e-12 * a.mean);
}

TEST(MonteCarloRisk, StdErrorShrinksWithReps) {
  // Average over several independent masters to make the ratio check stable.
  double se_small = 0.0, se_big = 0.0;
  for (std::uint64_t master = 0; master < 6; ++master) {
    se_small += monte_carlo_risk(small_scenario("se", 16), master).std_error;
    se_big += monte_carlo_risk(small_scenario("se", 32), master).std_error;
  }
  EXPECT_NEAR(se_small / se_big, std::sqrt(2.0), 0.35);
}

TEST(MonteCarloRisk, SideMetricsAndFailureContext) {
  const Scenario s = small_scenario("side", 3);
  MonteCarloOptions options;
  options.side_metric = [](const RegressionInstance& inst) {
    return std::vector<double>{inst.Y.squaredNorm()};
  };
  const auto mc = monte_carlo_risk(s, 2, options);
  ASSERT_EQ(mc.side_metrics.size(), 3u);
  EXPECT_GT(mc.side_metrics[2][0], 0.0);

  options.side_metric = [](const RegressionInstance&) -> std::vector<double> {
    throw std::runtime_error("boom");
  };
  try {
    monte_carlo_risk(s, 2, options);
    FAIL();
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("side"), std::string::npos);
    EXPECT_NE(msg.find("replication 0"), std::string::npos);
  }
}

TEST(MeanAndStdError, Basic) {
  const auto [m, se] = mean_and_std_error({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(m, 2.5);
  EXPECT_NEAR(se, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
}

TEST(ParallelFor, RethrowsLowestIndex) {
  try {
    parallel_for(10, 3, [](int i) {
      if (i == 7 || i == 4) throw std::runtime_error("fail " + std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "fail 4");
  }
}
