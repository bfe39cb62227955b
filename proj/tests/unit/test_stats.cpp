#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hrvqe/errors.hpp"
#include "hrvqe/rng.hpp"
#include "hrvqe/stats.hpp"

using namespace hrvqe;

TEST(Stats, PearsonKnownValues) {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  const std::vector<double> y = {2, 4, 6, 8, 10};
  const std::vector<double> z = {5, 4, 3, 2, 1};
  EXPECT_NEAR(pearson(x, y), 1.0, 1e-12);
  EXPECT_NEAR(pearson(x, z), -1.0, 1e-12);
  const std::vector<double> w = {1, 0, 1, 0, 1};
  EXPECT_NEAR(pearson(x, w), 0.0, 1e-12);
  EXPECT_TRUE(std::isnan(pearson(x, std::vector<double>(5, 3.0))));
}

TEST(Stats, PearsonInvariantUnderAffineMaps) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<double> x(100), y(100);
  for (std::size_t i = 0; i < 100; ++i) {
    x[i] = g(rng);
    y[i] = x[i] + g(rng);
  }
  std::vector<double> y2 = y;
  for (auto& v : y2) v = 3.0 * v - 7.0;
  EXPECT_NEAR(pearson(x, y), pearson(x, y2), 1e-12);
  EXPECT_LE(std::abs(pearson(x, y)), 1.0);
}

TEST(Stats, MeanStdMedian) {
  const std::vector<double> x = {2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(mean(x), 5.0);
  EXPECT_NEAR(stddev(x), std::sqrt(32.0 / 7.0), 1e-12);
  EXPECT_DOUBLE_EQ(median(x), 4.5);
  EXPECT_DOUBLE_EQ(median({3.0, 1.0, 2.0}), 2.0);
}

TEST(Stats, TailTakesCeilFraction) {
  const std::vector<double> x = {1, 2, 3, 4, 5, 6, 7};
  EXPECT_EQ(tail(x, 0.25), (std::vector<double>{6, 7}));
  EXPECT_EQ(tail(x, 1.0), x);
}

TEST(Stats, ErrorsOnDegenerateInput) {
  EXPECT_THROW(mean({}), DomainError);
  EXPECT_THROW(stddev(std::vector<double>{1.0}), DomainError);
  EXPECT_THROW(median({}), DomainError);
  EXPECT_THROW(pearson(std::vector<double>{1, 2}, std::vector<double>{1}), DimensionError);
}

TEST(Rng, SubstreamsAreDeterministicAndDistinct) {
  EXPECT_EQ(substream_seed(1, 2), substream_seed(1, 2));
  EXPECT_NE(substream_seed(1, 2), substream_seed(2, 1));
  EXPECT_NE(substream_seed(1, 2), substream_seed(1, 3));
}
