#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "alm/error.hpp"
#include "alm/riskopt.hpp"
#include "oracles.hpp"

using namespace alm;
using namespace alm::riskopt;

TEST(EntropicRisk, ConstantSample) {
  const std::vector<double> x(17, 3.25);
  for (double g : {0.01, 0.3, 5.0}) EXPECT_NEAR(entropic_risk(x, g), -3.25, 1e-14);
}

TEST(EntropicRisk, TwoPointClosedForm) {
  const std::vector<double> x{0.0, 10.0};
  const double closed = std::log((1.0 + std::exp(-3.0)) / 2.0) / 0.3;
  EXPECT_NEAR(entropic_risk(x, 0.3), closed, 1e-14);
  EXPECT_NEAR(entropic_risk(x, 0.3), oracle::entropic(x, 0.3), 1e-14);
  EXPECT_NEAR(entropic_risk(x, 0.3), -2.14853, 5e-6);
}

TEST(EntropicRisk, NoOverflow) {
  const std::vector<double> x{-1000.0, 5.0, 7.0};
  const double r = entropic_risk(x, 0.5);
  ASSERT_TRUE(std::isfinite(r));
  // exp(500) dominates the sum.
  EXPECT_NEAR(r, 1000.0 - std::log(3.0) / 0.5, 1e-9);
  const std::vector<double> y{1e6, 2e6};
  EXPECT_TRUE(std::isfinite(entropic_risk(y, 10.0)));
}

TEST(EntropicRisk, Errors) {
  EXPECT_THROW(entropic_risk(std::vector<double>{}, 0.3), DomainError);
  EXPECT_THROW(entropic_risk(std::vector<double>{1.0}, 0.0), DomainError);
  EXPECT_THROW(entropic_risk(std::vector<double>{1.0}, -1.0), DomainError);
}

TEST(EntropicRisk, MatchesDirectSummation) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z(15.0, 4.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> x(50);
    for (auto& v : x) v = z(rng);
    for (double g : {0.05, 0.1, 0.3, 0.5}) {
      EXPECT_NEAR(entropic_risk(x, g), oracle::entropic(x, g), 1e-10);
    }
  }
}

TEST(EntropicRisk, Axioms) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z(0.0, 5.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 300; ++rep) {
    const double g = 0.01 + u(rng);
    std::vector<double> x(40), y(40), shifted(40), mixed(40);
    for (std::size_t k = 0; k < x.size(); ++k) {
      x[k] = z(rng);
      y[k] = x[k] - std::abs(z(rng));
    }
    const double c = z(rng);
    for (std::size_t k = 0; k < x.size(); ++k) shifted[k] = x[k] + c;
    EXPECT_NEAR(entropic_risk(shifted, g), entropic_risk(x, g) - c, 1e-10);
    EXPECT_LE(entropic_risk(x, g), entropic_risk(y, g));
    const double lam = u(rng);
    for (std::size_t k = 0; k < x.size(); ++k) mixed[k] = lam * x[k] + (1 - lam) * y[k];
    EXPECT_LE(entropic_risk(mixed, g), lam * entropic_risk(x, g) + (1 - lam) * entropic_risk(y, g) + 1e-10);
  }
}

TEST(EntropicRisk, SmallGammaLimit) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (double g : {1e-4, 1e-5, 1e-6}) {
    std::vector<double> x(200);
    for (auto& v : x) v = u(rng);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= x.size();
    EXPECT_LE(std::abs(entropic_risk(x, g) + mean), g * var);
  }
}

TEST(DiversifiedObjective, SingleColumn) {
  std::mt19937_64 rng(4);
  const auto w = oracle::random_matrix(rng, 30, 1);
  const std::vector<double> a{1.0};
  EXPECT_DOUBLE_EQ(diversified_objective(a, w, 0.3).value, entropic_risk(w.column(0), 0.3));
}

TEST(DiversifiedObjective, IdenticalColumnsHaveEqualGradient) {
  std::mt19937_64 rng(5);
  const auto base = oracle::random_matrix(rng, 30, 1);
  const auto w = base.with_column(base.column(0));
  const std::vector<double> a{0.3, 0.7};
  const auto obj = diversified_objective(a, w, 0.3);
  EXPECT_DOUBLE_EQ(obj.gradient[0], obj.gradient[1]);
}

TEST(DiversifiedObjective, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    const auto w = oracle::random_matrix(rng, 5, 2);
    const auto a = oracle::random_simplex(rng, 2);
    const auto obj = diversified_objective(a, w, 0.3);
    const auto fd = oracle::fd_gradient(w, a, 0.3, 1e-6);
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_NEAR(obj.gradient[i], fd[i], 1e-6 * std::max(1.0, std::abs(fd[i])));
    }
    EXPECT_NEAR(obj.value, oracle::objective(w, a, 0.3), 1e-10);
  }
}

TEST(DiversifiedObjective, DimensionMismatch) {
  riskopt::TerminalWealthMatrix w(3, 2);
  EXPECT_THROW(diversified_objective(std::vector<double>{1.0}, w, 0.3), DomainError);
}

TEST(Certificates, GapAndKkt) {
  const std::vector<double> a{0.5, 0.5, 0.0};
  const std::vector<double> g{1.0, 1.0, 3.0};
  EXPECT_EQ(simplex_gap(a, g), 0.0);
  EXPECT_EQ(kkt_violation(a, g, 1e-12), 0.0);
  const std::vector<double> b{0.2, 0.3, 0.5};
  EXPECT_NEAR(simplex_gap(b, g), 1.0, 1e-15);
  EXPECT_NEAR(kkt_violation(b, g, 1e-12), 2.0, 1e-15);
}

TEST(OptimizeWeights, DominatingColumnIsCorner) {
  std::mt19937_64 rng(7);
  auto w = oracle::random_matrix(rng, 40, 3);
  for (std::size_t k = 0; k < 40; ++k) {
    w(k, 0) = std::max(w(k, 1), w(k, 2)) + 0.5;
  }
  const auto res = optimize_weights(w, 0.3);
  EXPECT_NEAR(res.alpha[0], 1.0, 1e-6);
  EXPECT_NEAR(res.value, entropic_risk(w.column(0), 0.3), 1e-8);
  EXPECT_LE(res.value, oracle::simplex_grid(w, 0.3, 200).value + 1e-12);
}

TEST(OptimizeWeights, TiedColumns) {
  std::mt19937_64 rng(8);
  const auto base = oracle::random_matrix(rng, 25, 1);
  const auto w = base.with_column(base.column(0));
  const auto res = optimize_weights(w, 0.3);
  EXPECT_NEAR(res.value, entropic_risk(base.column(0), 0.3), 1e-12);
  EXPECT_NEAR(res.alpha[0] + res.alpha[1], 1.0, 1e-12);
}

TEST(OptimizeWeights, MatchesGridOracle) {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 5; ++rep) {
    const auto w = oracle::random_matrix(rng, 16, 3);
    const auto grid = oracle::simplex_grid(w, 0.3, 1000);
    const auto res = optimize_weights(w, 0.3);
    EXPECT_NEAR(res.value, grid.value, 1e-4);
    EXPECT_LE(res.residual, 1e-8);
    EXPECT_NEAR(std::accumulate(res.alpha.begin(), res.alpha.end(), 0.0), 1.0, 1e-12);
    for (double a : res.alpha) EXPECT_GE(a, 0.0);
  }
}

TEST(OptimizeWeights, ValueIsObjectiveAtAlpha) {
  std::mt19937_64 rng(10);
  const auto w = oracle::random_matrix(rng, 200, 12);
  const auto res = optimize_weights(w, 0.5);
  EXPECT_NEAR(res.value, entropic_risk(w.mix(res.alpha), 0.5), 1e-12);
  EXPECT_NEAR(res.residual, simplex_gap(res.alpha, diversified_objective(res.alpha, w, 0.5).gradient),
              1e-15);
  // No single column beats the optimal mixture.
  for (std::size_t i = 0; i < 12; ++i) EXPECT_LE(res.value, entropic_risk(w.column(i), 0.5) + 1e-8);
}

TEST(OptimizeWeights, AddingColumnNeverHurts) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    const auto w = oracle::random_matrix(rng, 60, 4);
    const auto extra = oracle::random_matrix(rng, 60, 1).column(0);
    const auto small = optimize_weights(w, 0.1);
    const auto big = optimize_weights(w.with_column(extra), 0.1);
    EXPECT_LE(big.value, small.value + 1e-8);
  }
}

TEST(OptimizeWeights, ReportsBestIterateOnIterationLimit) {
  std::mt19937_64 rng(12);
  const auto w = oracle::random_matrix(rng, 100, 20);
  OptimizerOptions opts;
  opts.max_iters = 3;
  opts.eg_iters = 3;
  try {
    optimize_weights(w, 0.3, opts);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.best_alpha().size(), 20u);
    EXPECT_GT(e.residual(), opts.tol);
    EXPECT_NEAR(e.best_value(), entropic_risk(w.mix(e.best_alpha()), 0.3), 1e-10);
  }
}

TEST(OptimizeWeights, StartPointValidation) {
  riskopt::TerminalWealthMatrix w(2, 2, {1.0, 2.0, 3.0, 4.0});
  EXPECT_THROW(optimize_weights(w, 0.3, {}, std::vector<double>{1.0}), DomainError);
  EXPECT_THROW(optimize_weights(w, 0.3, {}, std::vector<double>{1.0, 0.0}), DomainError);
  EXPECT_NO_THROW(optimize_weights(w, 0.3, {}, std::vector<double>{2.0, 5.0}));
}

TEST(RankStrategies, Basics) {
  riskopt::TerminalWealthMatrix one(3, 1, {1.0, 2.0, 3.0});
  const auto r1 = rank_strategies(one, 0.3, 1);
  ASSERT_EQ(r1.size(), 1u);
  EXPECT_EQ(r1[0].id, 1);
  EXPECT_DOUBLE_EQ(r1[0].rho, entropic_risk(one.column(0), 0.3));

  // Column 2 dominates column 1; columns 2 and 3 tie.
  riskopt::TerminalWealthMatrix w(2, 3, {1.0, 2.0, 2.0, 3.0, 4.0, 4.0});
  const auto r = rank_strategies(w, 0.3, 3, std::vector<int>{10, 20, 15});
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].id, 15);
  EXPECT_EQ(r[1].id, 20);
  EXPECT_EQ(r[2].id, 10);
  EXPECT_THROW(rank_strategies(w, 0.3, 4), DomainError);
}
