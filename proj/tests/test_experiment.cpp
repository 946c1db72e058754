#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "alm/catalogue.hpp"
#include "alm/error.hpp"
#include "alm/experiment.hpp"
#include "alm/model_config.hpp"
#include "alm/scenario_io.hpp"
#include "test_support.hpp"

using namespace alm;
using strategies::StrategyKind;

namespace {

std::vector<economy::Scenario> default_scenarios(std::size_t n, std::uint64_t seed) {
  const auto cfg = load_model_config(support::config_path("default_model.ini"));
  auto sim = cfg.simulation;
  sim.n = n;
  sim.seed = seed;
  return economy::generate_scenarios(cfg.initial_state, cfg.coeffs, sim, cfg.durations);
}

Catalogue default_catalogue() {
  return build_catalogue(load_catalogue_config(support::config_path("default_catalogue.ini")), 30);
}

Catalogue small_catalogue() {
  return build_catalogue(parse_catalogue_config(R"(
[buy_and_hold]
allocations = 0 1 0 0 | 0 0 0 1
[fixed_proportions]
pairs = 2/4
risky_shares = 0.25 0.5
[survival_index]
target = 2
rest = 0 0 0 1
a = 0.75 1
[term_spread]
a = -0.5
b = 5
)"),
                         30);
}

std::string objective_csv(const RunReport& r) {
  std::ostringstream out;
  write_objective_csv(out, r);
  return out.str();
}

}  // namespace

TEST(Experiment, DegenerateSingleStrategy) {
  const auto cat = build_catalogue(
      parse_catalogue_config("[fixed_proportions]\npairs = 2/4\nrisky_shares = 0.25\n"), 30);
  ExperimentPlan plan;
  plan.gammas = {0.3};
  plan.strategy_sets = {StrategySet::All};
  plan.liability_modes = {false};
  const auto scns = default_scenarios(50, 3);
  const auto rep = run_experiment(plan, cat, scns);
  ASSERT_EQ(rep.cells.size(), 1u);
  const auto& c = rep.cells[0];
  ASSERT_TRUE(c.ok) << c.error;
  ASSERT_EQ(c.alpha.size(), 1u);
  EXPECT_EQ(c.alpha[0], 1.0);
  // A constant mix shows up as a horizontal scatter line.
  ASSERT_EQ(c.scatter.points.size(), 50u);
  for (const auto& p : c.scatter.points) EXPECT_NEAR(p.long_bond_share, 0.75, 1e-12);
}

TEST(Experiment, PlanValidation) {
  ExperimentPlan plan;
  plan.gammas = {};
  EXPECT_THROW(plan.validate(), ConfigError);
  plan.gammas = {0.0};
  EXPECT_THROW(plan.validate(), ConfigError);
  plan.gammas = {0.1};
  EXPECT_NO_THROW(plan.validate());
  EXPECT_THROW(run_experiment(plan, small_catalogue(), {}), ConfigError);
}

TEST(Experiment, EmptySetFailsOnlyItsCells) {
  const auto cat = build_catalogue(parse_catalogue_config("[survival_index]\nrest = 0 0 0 1\na = 1\n"), 30);
  ExperimentPlan plan;
  plan.gammas = {0.3};
  const auto rep = run_experiment(plan, cat, default_scenarios(40, 4));
  ASSERT_EQ(rep.cells.size(), 4u);
  for (const auto& c : rep.cells) {
    EXPECT_EQ(c.ok, c.set == StrategySet::All) << c.label();
    if (!c.ok) EXPECT_FALSE(c.error.empty());
  }
  EXPECT_FALSE(rep.reduction_percent(0.3, true).has_value());
}

TEST(Experiment, ConsistencyAndMonotonicity) {
  ExperimentPlan plan;
  plan.gammas = {0.05, 0.3};
  const auto cat = small_catalogue();
  const auto rep = run_experiment(plan, cat, default_scenarios(400, 5));
  ASSERT_EQ(rep.cells.size(), 8u);
  for (const auto& c : rep.cells) {
    ASSERT_TRUE(c.ok) << c.label() << ": " << c.error;
    EXPECT_EQ(c.rho, riskopt::entropic_risk(c.mixed_wealth, c.gamma)) << c.label();
    EXPECT_LE(c.residual, plan.optimizer.tol);
  }
  for (double g : plan.gammas) {
    for (bool liab : {true, false}) {
      const auto* base = rep.find(g, StrategySet::NonLdi, liab);
      const auto* all = rep.find(g, StrategySet::All, liab);
      ASSERT_TRUE(base && all);
      EXPECT_LE(all->rho, base->rho);
      EXPECT_DOUBLE_EQ(*rep.reduction_percent(g, liab),
                       100.0 * (base->rho - all->rho) / std::abs(base->rho));
    }
  }
}

TEST(Experiment, Deterministic) {
  ExperimentPlan plan;
  plan.gammas = {0.1};
  const auto cat = small_catalogue();
  const auto a = run_experiment(plan, cat, default_scenarios(300, 77));
  plan.threads = 3;
  const auto b = run_experiment(plan, cat, default_scenarios(300, 77));
  EXPECT_EQ(objective_csv(a), objective_csv(b));
}

TEST(Experiment, RegenerationFromScenarioFile) {
  ExperimentPlan plan;
  plan.gammas = {0.3};
  const auto cat = small_catalogue();
  const auto scns = default_scenarios(200, 8);
  const auto path = std::filesystem::temp_directory_path() / "alm_regen.csv";
  save_scenarios(path, scns);
  const auto a = run_experiment(plan, cat, scns);
  const auto b = run_experiment(plan, cat, load_scenarios(path));
  std::filesystem::remove(path);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) EXPECT_NEAR(a.cells[i].rho, b.cells[i].rho, 1e-12);
}

TEST(Experiment, WritesReportFiles) {
  ExperimentPlan plan;
  plan.gammas = {0.3};
  const auto cat = small_catalogue();
  const auto rep = run_experiment(plan, cat, default_scenarios(100, 9));
  const auto dir = std::filesystem::temp_directory_path() / "alm_report_test";
  std::filesystem::remove_all(dir);
  write_report(dir, plan, cat, rep);
  for (const char* f : {"objective.csv", "catalogue.csv", "report.txt", "scatter_summary.csv",
                        "weights_with_all_g0.3.csv", "topk_without_non_ldi_g0.3.csv",
                        "scatter_with_all_g0.3.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  std::ifstream in(dir / "objective.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "gamma,set,liabilities,rho");
  std::filesystem::remove_all(dir);
}

TEST(Scatter, SurvivalIndexStrategyTracksSurvival) {
  strategies::StrategySpec si;
  si.kind = StrategyKind::SurvivalIndex;
  si.exposed = support::unit(1);
  si.rest = support::unit(3);
  si.a = 1.0;
  const auto scns = default_scenarios(200, 10);
  const std::vector<double> alpha{1.0};
  const std::vector<strategies::StrategySpec> specs{si};
  const auto res = scatter_extract(alpha, specs, scns, strategies::PropagationSettings{}, 15);
  ASSERT_EQ(res.points.size() + res.excluded, 200u);
  double lo = 1.0, hi = 0.0;
  for (const auto& p : res.points) {
    if (p.wealth <= 0.0) continue;
    EXPECT_NEAR(p.long_bond_share, std::min(scns[p.scenario].survival[15], 1.0), 1e-12);
    lo = std::min(lo, p.long_bond_share);
    hi = std::max(hi, p.long_bond_share);
  }
  EXPECT_LT(lo, hi);
  EXPECT_THROW(scatter_extract(alpha, specs, scns, {}, 31), DomainError);
}

TEST(Scatter, ZeroWealthIsExcluded) {
  strategies::StrategySpec fp;
  fp.pi = support::unit(1);
  auto s = support::flat_scenario(3, {1, 1, 1, 1}, 0.0);
  s.claims[1] = 15.0;
  const std::vector<economy::Scenario> scns{s, support::flat_scenario(3, {1, 1, 1, 1}, 0.0)};
  const std::vector<double> alpha{1.0};
  const std::vector<strategies::StrategySpec> specs{fp};
  const auto res = scatter_extract(alpha, specs, scns, {}, 1);
  EXPECT_EQ(res.excluded, 1u);
  ASSERT_EQ(res.points.size(), 1u);
  EXPECT_EQ(res.points[0].scenario, 1u);
}

TEST(RankCorrelation, Examples) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> up{2, 4, 8, 16, 32};
  const std::vector<double> down{5, 4, 3, 2, 1};
  EXPECT_NEAR(rank_correlation(x, up), 1.0, 1e-15);
  EXPECT_NEAR(rank_correlation(x, down), -1.0, 1e-15);
  // Ties get average ranks: ranks of y are (1.5, 1.5, 3), of x (1, 2, 3).
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{7, 7, 9};
  EXPECT_NEAR(rank_correlation(a, b), 1.5 / std::sqrt(2.0 * 1.5), 1e-15);
  EXPECT_TRUE(std::isnan(rank_correlation(std::vector<double>{1}, std::vector<double>{2})));
}

// Qualitative behaviour of the shipped defaults at a reduced scenario count.
// The full-size objective table checks live in the acceptance suite.
TEST(DefaultRun, LiabilityDrivenPatterns) {
  ExperimentPlan plan;
  const auto cat = default_catalogue();
  const auto rep = run_experiment(plan, cat, default_scenarios(3000, 20070101));
  for (const auto& c : rep.cells) ASSERT_TRUE(c.ok) << c.label() << ": " << c.error;

  // With liabilities the gain from liability-driven strategies grows with
  // risk aversion up to gamma = 0.3.
  EXPECT_LT(*rep.reduction_percent(0.05, true), *rep.reduction_percent(0.1, true));
  EXPECT_LT(*rep.reduction_percent(0.1, true), *rep.reduction_percent(0.3, true));

  const auto* with = rep.find(0.3, StrategySet::All, true);
  const auto* without = rep.find(0.3, StrategySet::All, false);
  for (const auto& r : with->top) {
    EXPECT_TRUE(cat.entries[r.id - 1].spec.liability_driven()) << r.id;
  }
  for (const auto& r : without->top) {
    EXPECT_FALSE(cat.entries[r.id - 1].spec.liability_driven()) << r.id;
  }

  auto corr = [](const CellResult* c) {
    std::vector<double> w, p;
    for (const auto& pt : c->scatter.points) {
      w.push_back(pt.wealth);
      p.push_back(pt.long_bond_share);
    }
    return rank_correlation(w, p);
  };
  EXPECT_GT(corr(with), 0.0);
  EXPECT_LT(std::abs(corr(without)), std::abs(corr(with)));
}
