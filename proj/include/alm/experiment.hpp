#pragma once

// End-to-end experiment: terminal-wealth matrices per liability mode, optimal
// diversification per (gamma, strategy set, liability mode) cell, and reports.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "alm/catalogue.hpp"
#include "alm/economy.hpp"
#include "alm/riskopt.hpp"
#include "alm/strategies.hpp"

namespace alm {

enum class StrategySet { NonLdi, All };
std::string_view set_label(StrategySet set);

struct ExperimentPlan {
  std::vector<double> gammas{0.05, 0.1, 0.3, 0.5};
  std::vector<StrategySet> strategy_sets{StrategySet::NonLdi, StrategySet::All};
  std::vector<bool> liability_modes{true, false};
  std::size_t n_scenarios = 10000;
  std::uint64_t seed = 1;
  double initial_wealth = 15.0;
  std::size_t horizon = 30;
  double borrow_margin = 0.01;
  std::size_t top_k = 5;
  std::size_t scatter_time = 15;
  unsigned threads = 0;  // 0: hardware concurrency
  riskopt::OptimizerOptions optimizer;

  // Throws ConfigError on empty lists or non-positive gammas.
  void validate() const;
};

struct ScatterPoint {
  std::size_t scenario = 0;
  double wealth = 0.0;
  double long_bond_share = 0.0;  // pi^2 of the aggregate strategy
};

struct ScatterResult {
  std::vector<ScatterPoint> points;
  std::size_t excluded = 0;  // scenarios with zero aggregate wealth
};

// Aggregate pi^2 at time t of the alpha-mixture of the given strategies,
// sum_i alpha_i h^i_{t,2} / sum_i alpha_i w^i_t, one point per scenario.
ScatterResult scatter_extract(std::span<const double> alpha,
                              std::span<const strategies::StrategySpec> specs,
                              std::span<const economy::Scenario> scenarios,
                              const strategies::PropagationSettings& settings, std::size_t t);

// Spearman rank correlation (average ranks for ties). NaN for fewer than two points.
double rank_correlation(std::span<const double> x, std::span<const double> y);

struct CellResult {
  double gamma = 0.0;
  StrategySet set = StrategySet::All;
  bool liabilities = true;
  bool ok = false;
  std::string error;
  double rho = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  std::vector<int> ids;              // strategy ids of the columns in this cell
  std::vector<double> alpha;
  std::vector<double> mixed_wealth;  // W alpha, one entry per scenario
  std::vector<riskopt::RankedStrategy> top;
  ScatterResult scatter;

  std::string label() const;
};

struct RunReport {
  std::vector<CellResult> cells;
  std::size_t n_scenarios = 0;

  const CellResult* find(double gamma, StrategySet set, bool liabilities) const;
  // 100 (rho_nonLDI - rho_all) / |rho_nonLDI|; empty when either cell is missing or failed.
  std::optional<double> reduction_percent(double gamma, bool liabilities) const;
};

// Terminal wealth of every catalogue strategy on every scenario plus the
// time-t snapshots used by the scatter extract.
struct WealthMatrices {
  riskopt::TerminalWealthMatrix terminal;
  riskopt::TerminalWealthMatrix wealth_at;      // w_t
  riskopt::TerminalWealthMatrix long_bond_at;   // h_{t,2}
};

WealthMatrices build_wealth_matrices(const Catalogue& cat,
                                     std::span<const economy::Scenario> scenarios,
                                     const strategies::PropagationSettings& settings,
                                     std::size_t snapshot_time, unsigned threads);

// `scenarios` carry the with-liability claims; the without-liability cells
// reuse the same paths with c_t = 0.
RunReport run_experiment(const ExperimentPlan& plan, const Catalogue& cat,
                         const std::vector<economy::Scenario>& scenarios);

// Writes objective.csv, weights_<cell>.csv, topk_<cell>.csv, scatter_<cell>.csv,
// scatter_summary.csv, catalogue.csv and report.txt into `dir`.
void write_report(const std::filesystem::path& dir, const ExperimentPlan& plan,
                  const Catalogue& cat, const RunReport& report);

void write_objective_csv(std::ostream& out, const RunReport& report);

}  // namespace alm
