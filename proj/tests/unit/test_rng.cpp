#include <gtest/gtest.h>

#include <random>
#include <set>

#include "bayesrank/rng.hpp"

using namespace bayesrank;

TEST(Rng, SplitmixReferenceVector) {
  // First output of the reference splitmix64 generator started from state 0.
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Rng, Fnv1aReferenceVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    differs |= x != c();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, Uniform01InRangeWithMeanHalf) {
  Rng rng(7);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // sd of the mean is sqrt(1/12 / n) ~ 6.5e-4
  EXPECT_NEAR(sum / n, 0.5, 4e-3);
}

TEST(Rng, StreamSeedsAreDistinctAndStable) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t master : {0ULL, 1ULL, 99ULL})
    for (const char* id : {"a", "b", "s1"})
      for (std::uint64_t rep = 0; rep < 20; ++rep)
        EXPECT_TRUE(seen.insert(stream_seed(master, id, rep)).second);
  EXPECT_EQ(stream_seed(5, "x", 3), stream_seed(5, "x", 3));
  EXPECT_NE(substream_seed(11, "noise"), substream_seed(11, "sampler"));
}

TEST(Rng, WorksWithStdDistributions) {
  Rng rng(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  double s = 0.0, s2 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double z = normal(rng);
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.02);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}
