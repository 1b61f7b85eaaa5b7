#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "latline/errors.hpp"
#include "latline/math_kernels.hpp"
#include "latline/model.hpp"
#include "support/quadrature.hpp"

namespace latline {
namespace {

ModelParams params(double n, double c, Decay d) { return {n, c, d, 0.05}; }

TEST(ModelParams, Validation) {
  EXPECT_NO_THROW(ModelParams{}.validate());
  EXPECT_THROW((ModelParams{0.0, 1.0, Decay::Exponential, 0.05}.validate()), ConfigError);
  EXPECT_THROW((ModelParams{25.0, 0.0, Decay::Exponential, 0.05}.validate()), ConfigError);
  EXPECT_THROW((ModelParams{25.0, 1.5, Decay::Exponential, 0.05}.validate()), ConfigError);
  EXPECT_THROW((ModelParams{25.0, 1.0, Decay::Exponential, 0.1}.validate()), ConfigError);
  EXPECT_THROW((ModelParams{25.0, 1.0, Decay::Exponential, 0.0}.validate()), ConfigError);
  EXPECT_NO_THROW((ModelParams{25.0, 1.0, Decay::Exponential, 0.5}.validate_model()));
}

TEST(ParseDecay, Spellings) {
  EXPECT_EQ(parse_decay("exp"), Decay::Exponential);
  EXPECT_EQ(parse_decay("linear"), Decay::Linear);
  EXPECT_THROW(parse_decay("quadratic"), ConfigError);
  EXPECT_EQ(to_string(Decay::Linear), "lin");
}

TEST(PositionVector, RejectsOffSegment) {
  EXPECT_THROW(PositionVector(10.0, {1.0, 11.0}), DomainError);
  EXPECT_THROW(PositionVector(10.0, {-0.5}), DomainError);
  EXPECT_NO_THROW(PositionVector(10.0, {0.0, 10.0}));
}

TEST(SamplePositions, EmptyAndDeterministic) {
  const ModelParams p;
  EXPECT_TRUE(sample_positions(0, p, 1).empty());
  EXPECT_EQ(sample_positions(100, p, 9), sample_positions(100, p, 9));
  EXPECT_NE(sample_positions(100, p, 9), sample_positions(100, p, 10));
}

TEST(SamplePositions, VertexDependsOnlyOnSeedAndIndex) {
  const ModelParams p;
  const auto small = sample_positions(10, p, 4);
  const auto large = sample_positions(1000, p, 4);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(small[i], large[i]);
}

TEST(SamplePositions, UniformMoments) {
  const ModelParams p;
  const auto x = sample_positions(1'000'000, p, 5);
  double mean = 0.0;
  for (double v : x.values()) {
    ASSERT_GE(v, 0.0);
    ASSERT_LE(v, 25.0);
    mean += v;
  }
  mean /= 1e6;
  EXPECT_NEAR(mean, 12.5, 3.0 * (25.0 / std::sqrt(12.0)) / 1e3);
}

TEST(EdgeProbability, Examples) {
  EXPECT_EQ(edge_probability(params(25, 1, Decay::Exponential), 0.0), 1.0);
  EXPECT_NEAR(edge_probability(params(25, 0.5, Decay::Exponential), std::log(2.0)), 0.25, 1e-15);
  EXPECT_EQ(edge_probability(params(25, 1, Decay::Linear), 1.0), 0.5);
  EXPECT_THROW(edge_probability(params(25, 1, Decay::Linear), -1.0), DomainError);
}

TEST(RandomGraph, ConstructionInvariants) {
  const std::vector<std::pair<Vertex, Vertex>> tri = {{0, 1}, {1, 2}, {0, 2}};
  const RandomGraph g(3, tri);
  EXPECT_EQ(g.edge_count(), 3u);
  for (Vertex v = 0; v < 3; ++v) EXPECT_EQ(g.degree(v), 2u);
  EXPECT_TRUE(g.has_edge(2, 0));
  const auto edges = g.edges();
  EXPECT_EQ(edges, (std::vector<std::pair<Vertex, Vertex>>{{0, 1}, {0, 2}, {1, 2}}));
  const std::vector<std::pair<Vertex, Vertex>> loop = {{1, 1}};
  EXPECT_THROW(RandomGraph(3, loop), DomainError);
  const std::vector<std::pair<Vertex, Vertex>> dup = {{0, 1}, {1, 0}};
  EXPECT_THROW(RandomGraph(3, dup), DomainError);
  const std::vector<std::pair<Vertex, Vertex>> bad = {{0, 3}};
  EXPECT_THROW(RandomGraph(3, bad), IndexError);
}

TEST(SampleGraph, TrivialCases) {
  const ModelParams p;
  EXPECT_EQ(sample_graph(PositionVector(25.0, {3.0}), p, 1).edge_count(), 0u);
  for (std::uint64_t s = 0; s < 50; ++s) {
    EXPECT_TRUE(sample_graph(PositionVector(25.0, {7.0, 7.0}), p, s).has_edge(0, 1));
  }
}

TEST(SampleGraph, EdgeCountMatchesPairProbabilities) {
  const ModelParams p;
  const auto x = sample_positions(2000, p, 21);
  const auto g = sample_graph(x, p, 22);
  double mu = 0.0, var = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double q = edge_probability(p, std::abs(x[i] - x[j]));
      mu += q;
      var += q * (1.0 - q);
    }
  EXPECT_NEAR(static_cast<double>(g.edge_count()), mu, 4.0 * std::sqrt(var));
}

TEST(SampleGraph, IndependentOfThreadCountAndCutoffIsConservative) {
  for (Decay d : {Decay::Exponential, Decay::Linear}) {
    const ModelParams p = params(25, 0.9, d);
    const auto x = sample_positions(1500, p, 31);
    const auto g1 = sample_graph(x, p, 32, {.threads = 1});
    EXPECT_EQ(g1, sample_graph(x, p, 32, {.threads = 3}));
    EXPECT_EQ(g1, sample_graph(x, p, 32, {.threads = 8}));
    if (d == Decay::Exponential) {
      EXPECT_EQ(g1, sample_graph(x, p, 32, {.threads = 2, .cutoff = true}));
    }
  }
}

TEST(SampleGraph, DegreeConcentratesOnExpectation) {
  const ModelParams p = params(10, 0.7, Decay::Linear);
  const auto x = sample_positions(300, p, 41);
  double mu = 0.0, var = 0.0;
  for (std::size_t j = 1; j < x.size(); ++j) {
    const double q = edge_probability(p, std::abs(x[0] - x[j]));
    mu += q;
    var += q * (1 - q);
  }
  const int R = 200;
  double mean = 0.0;
  for (int r = 0; r < R; ++r) mean += static_cast<double>(sample_graph(x, p, 1000 + r, {.threads = 1}).degree(0));
  mean /= R;
  EXPECT_NEAR(mean, mu, 4.0 * std::sqrt(var / R));
}

TEST(LogLikelihood, SmallCases) {
  const ModelParams p;
  EXPECT_EQ(log_likelihood(PositionVector(25, {1.0}), RandomGraph(1, {}), p), 0.0);
  const PositionVector x(25, {2.0, 3.0});
  const std::vector<std::pair<Vertex, Vertex>> e = {{0, 1}};
  EXPECT_NEAR(log_likelihood(x, RandomGraph(2, e), p), -1.0, 1e-15);
  EXPECT_NEAR(log_likelihood(x, RandomGraph(2, {}), p), std::log(1 - std::exp(-1.0)), 1e-15);
  EXPECT_NEAR(log_likelihood(x, RandomGraph(2, {}), p), -0.458675, 1e-6);
  EXPECT_EQ(log_likelihood(PositionVector(25, {4.0, 4.0}), RandomGraph(2, {}), p),
            -std::numeric_limits<double>::infinity());
}

TEST(LogLikelihood, MatchesPairwiseSum) {
  for (Decay d : {Decay::Exponential, Decay::Linear}) {
    for (double c : {1.0, 0.6}) {
      const ModelParams p = params(8, c, d);
      const auto x = sample_positions(120, p, 51);
      const auto g = sample_graph(x, p, 52);
      long double ref = 0.0L;
      for (Vertex i = 0; i < x.size(); ++i)
        for (Vertex j = i + 1; j < x.size(); ++j) {
          const long double q = edge_probability(p, std::abs(x[i] - x[j]));
          ref += g.has_edge(i, j) ? std::log(q) : std::log1p(-q);
        }
      EXPECT_NEAR(log_likelihood(x, g, p), static_cast<double>(ref), 1e-9 * std::abs(static_cast<double>(ref)));
    }
  }
}

TEST(ExpectedDegreeDensity, Examples) {
  EXPECT_NEAR(expected_degree_density(params(25, 1, Decay::Exponential), 12.5), (2 - 2 * std::exp(-12.5)) / 25, 1e-15);
  EXPECT_NEAR(expected_degree_density(params(25, 1, Decay::Exponential), 12.5), 0.0799997, 1e-7);
  EXPECT_NEAR(expected_degree_density(params(25, 1, Decay::Linear), 0.0), std::log(26.0) / 25, 1e-15);
  EXPECT_NEAR(expected_degree_density(params(25, 1, Decay::Linear), 0.0), 0.1303239, 1e-6);
  const auto pe = params(25, 0.8, Decay::Exponential);
  for (double x = 0; x <= 25; x += 1.3) EXPECT_NEAR(expected_degree_density(pe, x), expected_degree_density(pe, 25 - x), 1e-15);
  EXPECT_THROW(expected_degree_density(pe, 26.0), DomainError);
}

TEST(ExpectedDegreeDensity, MatchesQuadrature) {
  for (Decay d : {Decay::Exponential, Decay::Linear}) {
    const auto p = params(25, 0.8, d);
    for (int k = 0; k < 100; ++k) {
      const double x = 25.0 * k / 99.0;
      ASSERT_NEAR(expected_degree_density(p, x), testing::degree_density_by_quadrature(p, x), 1e-9) << x;
    }
  }
}

TEST(ExpectedCommonDensity, Examples) {
  const auto p = params(25, 1, Decay::Exponential);
  EXPECT_NEAR(expected_common_density(p, 12.5, 12.5), (1 - std::exp(-25.0)) / 25, 1e-15);
  EXPECT_NEAR(expected_common_density(p, 10, 11), (2 * std::exp(-1.0) - 0.5 * (std::exp(-21.0) + std::exp(-29.0))) / 25, 1e-15);
  EXPECT_NEAR(expected_common_density(p, 10, 11), 0.0294304, 1e-7);
  EXPECT_THROW(expected_common_density(p, -1, 11), DomainError);
}

TEST(ExpectedCommonDensity, MatchesQuadratureBothModels) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(0.0, 25.0);
  for (Decay d : {Decay::Exponential, Decay::Linear}) {
    const auto p = params(25, 0.9, d);
    for (int k = 0; k < 100; ++k) {
      const double a = u(rng);
      const double b = k % 10 == 0 ? a : u(rng);
      ASSERT_NEAR(expected_common_density(p, a, b), testing::common_density_by_quadrature(p, a, b), 1e-9) << a << ' ' << b;
    }
  }
}

TEST(ExpectedCommonDensity, MatchesMonteCarlo) {
  const auto p = params(25, 1, Decay::Exponential);
  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> u(0.0, 25.0);
  const int N = 1'000'000;
  double s = 0.0, s2 = 0.0;
  for (int k = 0; k < N; ++k) {
    const double y = u(rng);
    const double v = std::exp(-std::abs(y - 10.0)) * std::exp(-std::abs(y - 11.0));
    s += v;
    s2 += v * v;
  }
  const double mean = s / N;
  const double se = std::sqrt((s2 / N - mean * mean) / N);
  EXPECT_NEAR(expected_common_density(p, 10, 11), mean, 4 * se);
}

}  // namespace
}  // namespace latline
