#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bqr/diagnostics.hpp"
#include "bqr/distributions.hpp"
#include "bqr/errors.hpp"
#include "bqr/rng.hpp"

namespace bqr {
namespace {

std::vector<double> normals(std::size_t n, double mu, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = mu + draw::std_normal(rng);
  return v;
}

TEST(Psrf, IdenticalChainsBelowOne) {
  const std::vector<double> c = normals(100, 0.0, 1);
  const double r = psrf({c, c});
  EXPECT_LT(r, 1.0);
  EXPECT_NEAR(r, std::sqrt(99.0 / 100.0), 1e-12);
}

TEST(Psrf, IndependentNormalChains) {
  const double r = psrf({normals(10000, 0.0, 2), normals(10000, 0.0, 3)});
  EXPECT_GE(r, 0.99);
  EXPECT_LE(r, 1.05);
}

TEST(Psrf, SeparatedChains) { EXPECT_GT(psrf({normals(1000, 0.0, 4), normals(1000, 5.0, 5)}), 1.5); }

TEST(Psrf, HandComputation) {
  // Chains {0..9} and {1..10}: W = 55/6, B = 10 * 0.5 = 5.
  std::vector<double> a(10), b(10);
  std::iota(a.begin(), a.end(), 0.0);
  std::iota(b.begin(), b.end(), 1.0);
  const double w = 55.0 / 6.0;
  const double expected = std::sqrt((0.9 * w + 5.0 / 10.0) / w);
  EXPECT_NEAR(psrf({a, b}), expected, 1e-14);
}

TEST(Psrf, Preconditions) {
  const std::vector<double> ten(10, 1.0);
  EXPECT_THROW(psrf({ten}), InsufficientDraws);
  EXPECT_THROW(psrf({std::vector<double>(9, 1.0), std::vector<double>(9, 2.0)}), InsufficientDraws);
  EXPECT_THROW(psrf({ten, std::vector<double>(11, 1.0)}), DimensionMismatch);
  EXPECT_EQ(psrf({ten, ten}), 1.0);
  EXPECT_EQ(psrf({ten, std::vector<double>(10, 2.0)}), kInf);
}

TEST(Psrf, FromDrawStore) {
  DrawStore d({"a"}, {20, 0, 1});
  d.add_chain();
  d.add_chain();
  const auto x = normals(20, 0.0, 6);
  const auto y = normals(20, 0.3, 7);
  for (std::size_t t = 0; t < 20; ++t) {
    d.append(0, std::vector<double>{x[t]});
    d.append(1, std::vector<double>{y[t]});
  }
  EXPECT_EQ(psrf(d, "a"), psrf({x, y}));
}

TEST(Summarize, ConstantDraws) {
  const Summary s = summarize_values("c", std::vector<double>(50, 2.5));
  EXPECT_EQ(s.mean, 2.5);
  EXPECT_EQ(s.lower, 2.5);
  EXPECT_EQ(s.upper, 2.5);
  EXPECT_TRUE(s.excludes_zero);
}

TEST(Summarize, OneToHundred) {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  const Summary s = summarize_values("x", v);
  EXPECT_DOUBLE_EQ(s.mean, 50.5);
  EXPECT_NEAR(s.lower, 3.475, 1e-12);
  EXPECT_NEAR(s.upper, 97.525, 1e-12);
  EXPECT_TRUE(s.excludes_zero);
}

TEST(Summarize, SymmetricAboutZero) {
  std::vector<double> v;
  for (int i = -50; i <= 50; ++i) v.push_back(i);
  const Summary s = summarize_values("x", v);
  EXPECT_FALSE(s.excludes_zero);
  EXPECT_DOUBLE_EQ(s.mean, 0.0);
  EXPECT_DOUBLE_EQ(s.lower, -s.upper);
}

TEST(Summarize, PermutationInvariant) {
  const auto x = normals(400, 1.0, 8);
  DrawStore a({"p"}, {200, 0, 1});
  DrawStore b({"p"}, {200, 0, 1});
  for (int c = 0; c < 2; ++c) {
    a.add_chain();
    b.add_chain();
  }
  std::vector<double> shuffled = x;
  std::reverse(shuffled.begin(), shuffled.end());
  std::rotate(shuffled.begin(), shuffled.begin() + 77, shuffled.end());
  for (std::size_t t = 0; t < 200; ++t) {
    a.append(0, std::vector<double>{x[t]});
    a.append(1, std::vector<double>{x[200 + t]});
    b.append(0, std::vector<double>{shuffled[t]});
    b.append(1, std::vector<double>{shuffled[200 + t]});
  }
  const Summary sa = summarize(a)[0];
  const Summary sb = summarize(b)[0];
  EXPECT_NEAR(sa.mean, sb.mean, 1e-13);
  EXPECT_EQ(sa.lower, sb.lower);
  EXPECT_EQ(sa.upper, sb.upper);
}

TEST(Summarize, EmptyThrows) {
  EXPECT_THROW(summarize_values("x", {}), EmptyDraws);
  EXPECT_THROW(summarize(DrawStore({"a"}, {10, 0, 1})), EmptyDraws);
}

TEST(Quantile, LinearInterpolation) {
  const std::vector<double> v = {1.0, 2.0, 4.0, 8.0};
  EXPECT_EQ(sorted_quantile(v, 0.0), 1.0);
  EXPECT_EQ(sorted_quantile(v, 1.0), 8.0);
  EXPECT_DOUBLE_EQ(sorted_quantile(v, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(sorted_quantile(v, 0.9), 6.8);
}

Summary make(double mean, double lo, double hi) { return {"b", mean, lo, hi, false}; }

TEST(ReplicationMetrics, ExactEstimates) {
  const std::vector<double> truth = {1.0};
  const auto m = replication_metrics({{make(1.0, 0.5, 1.5)}, {make(1.0, 0.9, 1.1)}}, truth);
  EXPECT_EQ(m[0].bias, 0.0);
  EXPECT_EQ(m[0].mse, 0.0);
  EXPECT_EQ(m[0].coverage, 1.0);
  EXPECT_EQ(m[0].replications, 2u);
}

TEST(ReplicationMetrics, SymmetricErrors) {
  const std::vector<double> truth = {-0.5};
  const auto m = replication_metrics({{make(0.5, 0.0, 1.0)}, {make(-1.5, -2.0, 0.0)}}, truth);
  EXPECT_EQ(m[0].bias, 0.0);
  EXPECT_EQ(m[0].mse, 1.0);
  EXPECT_EQ(m[0].coverage, 0.5);
}

TEST(ReplicationMetrics, RandomBounds) {
  RngStream rng(9);
  std::vector<std::vector<Summary>> est;
  for (int r = 0; r < 50; ++r) {
    const double m = draw::std_normal(rng);
    est.push_back({make(m, m - 1.0, m + 1.0), make(2.0 * m, 2.0 * m - 0.1, 2.0 * m + 0.1)});
  }
  const std::vector<double> truth = {0.0, 0.3};
  for (const auto& m : replication_metrics(est, truth)) {
    EXPECT_GE(m.coverage, 0.0);
    EXPECT_LE(m.coverage, 1.0);
    EXPECT_GE(m.mse, m.bias * m.bias - 1e-12);
  }
}

TEST(ReplicationMetrics, Errors) {
  const std::vector<double> truth = {1.0, 2.0};
  EXPECT_THROW(replication_metrics({}, truth), InsufficientDraws);
  EXPECT_THROW(replication_metrics({{make(1, 0, 2)}}, truth), DimensionMismatch);
}

TEST(BatchMeans, IidMatchesNaiveStandardError) {
  const auto x = normals(100000, 0.0, 10);
  EXPECT_NEAR(batch_means_se(x, 50), 1.0 / std::sqrt(100000.0), 0.25 / std::sqrt(100000.0));
  EXPECT_THROW(batch_means_se(std::vector<double>(10, 0.0), 25), InsufficientDraws);
}

TEST(BatchMeans, Ar1InflatesError) {
  // AR(1) with rho = 0.9: long-run sd of the mean is sqrt((1+rho)/(1-rho)) / sqrt(n).
  RngStream rng(11);
  const double rho = 0.9;
  std::vector<double> x(200000);
  double prev = 0.0;
  for (double& v : x) {
    prev = rho * prev + std::sqrt(1 - rho * rho) * draw::std_normal(rng);
    v = prev;
  }
  const double expected = std::sqrt((1 + rho) / (1 - rho) / 200000.0);
  EXPECT_NEAR(batch_means_se(x, 50), expected, 0.3 * expected);
}

}  // namespace
}  // namespace bqr
