#pragma once

// Basis investment strategies and self-financing wealth propagation.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "alm/economy.hpp"

namespace alm::strategies {

inline constexpr std::size_t kAssets = economy::kAssets;
// Holdings carry one extra leg for money-market borrowing.
inline constexpr std::size_t kLoanLeg = kAssets;
inline constexpr std::size_t kLegs = kAssets + 1;

using Weights = std::array<double, kAssets>;
using Holdings = std::array<double, kLegs>;

enum class StrategyKind {
  BuyAndHold,
  FixedProportions,
  TargetDateFund,
  CPPI,
  TermSpread,
  CreditSpread,
  SurvivalIndex,
  Wealth,
};

std::string_view kind_name(StrategyKind kind);
bool is_liability_driven(StrategyKind kind);

// One basis strategy.
//
// BuyAndHold and FixedProportions use `pi` directly. Every other family
// computes an exposure e_t in [0, 1] and invests e_t of wealth according to
// the within-group proportions `exposed` and 1 - e_t according to `rest`:
//   TargetDateFund  e_t = a - b t                      (exposed = risky set)
//   CPPI            e_t = m max(1 - F_t / w_t, 0)      (exposed = risky set)
//   TermSpread      e_t = sigma_{a,b}(sT_t)            (exposed = long bond)
//   CreditSpread    e_t = sigma_{a,b}(sC_t)            (exposed = riskier bond)
//   SurvivalIndex   e_t = min(a S_t, 1)
//   Wealth          e_t = min(a w_t / w_0, 1)
struct StrategySpec {
  StrategyKind kind = StrategyKind::FixedProportions;
  Weights pi{};
  Weights exposed{};
  Weights rest{};
  double a = 0.0;
  double b = 0.0;
  double m = 0.0;  // CPPI multiplier
  double r = 0.0;  // CPPI floor discount rate

  bool liability_driven() const { return is_liability_driven(kind); }
  // Throws ConfigError on an infeasible specification for the given horizon.
  void validate(std::size_t horizon) const;
  // `key=value` pairs separated by ';' for reporting.
  std::string params_string() const;
};

// Everything a strategy may observe at time t.
struct Observation {
  std::size_t t = 0;
  double wealth = 0.0;
  double initial_wealth = 0.0;
  double survival = 1.0;
  double term_spread = 0.0;
  double credit_spread = 0.0;
  double floor = 0.0;
};

double sigmoid(double s, double a, double b);
double capped_linear(double s, double a);

// Exposure e_t of the families that split wealth between two groups.
double exposure(const StrategySpec& spec, const Observation& obs);

// Proportions pi_t for every proportion-based family (not BuyAndHold, whose
// rule is holdings-based and lives in propagate_wealth).
Weights allocate(const StrategySpec& spec, const Observation& obs);

struct FloorPath {
  std::vector<double> floor;  // F_0..F_T
  double rate = 0.0;
};

// F_T = 0 and F_{t-1} = (F_t + median_c_t) / (1 + r); median_claims holds c_1..c_T.
FloorPath cppi_floor(std::span<const double> median_claims, double r);

// Per-period lower median of c_1..c_T across scenarios.
std::vector<double> median_claims(std::span<const economy::Scenario> scenarios);

struct WealthPath {
  std::vector<double> wealth;      // w_0..w_T
  std::vector<Holdings> holdings;  // h_0..h_T, four assets plus the loan leg
};

struct PropagationSettings {
  double initial_wealth = 15.0;
  double borrow_margin = 0.01;
  // c_1..c_T medians used for CPPI floors; empty means no floor.
  std::vector<double> median_claims;
};

// Gross return of the loan leg over [t-1, t]: exp(Y1_{t-1} + margin).
double loan_return(const economy::Scenario& scn, std::size_t t, double margin);

// Self-financing wealth path of one strategy on one scenario. The budget holds
// with equality. While wealth is negative the whole balance sits in the loan
// leg and the strategy rule resumes once wealth is nonnegative again.
WealthPath propagate_wealth(const StrategySpec& spec, const economy::Scenario& scn,
                            const PropagationSettings& settings);

// Terminal wealth only; same arithmetic as propagate_wealth without storing the path.
double terminal_wealth(const StrategySpec& spec, const economy::Scenario& scn,
                       const PropagationSettings& settings);

// Cash-level mixture sum_i alpha_i h^i of paths on the same scenario.
WealthPath mix_paths(std::span<const WealthPath> paths, std::span<const double> alpha);

}  // namespace alm::strategies
