#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "alm/economy.hpp"
#include "alm/strategies.hpp"

namespace alm::support {

inline std::string config_path(const std::string& name) {
  return std::string(ALM_CONFIG_DIR) + "/" + name;
}

// Scenario with constant gross returns, constant claims and flat state paths.
inline economy::Scenario flat_scenario(std::size_t horizon, economy::Returns r, double claim,
                                       double y1 = std::log(0.025)) {
  economy::Scenario s;
  s.returns.assign(horizon, r);
  s.claims.assign(horizon + 1, claim);
  s.survival.assign(horizon + 1, 1.0);
  s.sT.assign(horizon + 1, 0.3);
  s.sC.assign(horizon + 1, -1.4);
  s.y1.assign(horizon + 1, y1);
  return s;
}

// Random paths with volatile returns; `claim_scale` large enough pushes some
// strategies through the borrowing regime.
inline economy::Scenario random_scenario(std::mt19937_64& rng, std::size_t horizon,
                                         double claim_scale = 1.0) {
  std::normal_distribution<double> z(0.0, 1.0);
  economy::Scenario s;
  s.survival.push_back(1.0);
  s.claims.push_back(claim_scale);
  s.sT.push_back(0.3 + 0.3 * z(rng));
  s.sC.push_back(-1.4 + 0.3 * z(rng));
  s.y1.push_back(std::log(0.025) + 0.3 * z(rng));
  for (std::size_t t = 1; t <= horizon; ++t) {
    s.returns.push_back({std::exp(0.02 + 0.01 * z(rng)), std::exp(0.03 + 0.06 * z(rng)),
                         std::exp(0.04 + 0.08 * z(rng)), std::exp(0.07 + 0.25 * z(rng))});
    const double p = 1.0 / (1.0 + std::exp(-(3.5 + 0.3 * z(rng))));
    s.survival.push_back(s.survival.back() * p);
    s.claims.push_back(claim_scale * s.survival.back());
    s.sT.push_back(0.3 + 0.3 * z(rng));
    s.sC.push_back(-1.4 + 0.3 * z(rng));
    s.y1.push_back(std::log(0.025) + 0.3 * z(rng));
  }
  return s;
}

inline strategies::Weights unit(std::size_t asset) {
  strategies::Weights w{};
  w[asset] = 1.0;
  return w;
}

// One representative specification per family.
inline std::vector<strategies::StrategySpec> one_per_family() {
  using strategies::StrategyKind;
  using strategies::StrategySpec;
  std::vector<StrategySpec> out;
  StrategySpec s;
  s.kind = StrategyKind::BuyAndHold;
  s.pi = {0.1, 0.4, 0.2, 0.3};
  out.push_back(s);
  s = {};
  s.kind = StrategyKind::FixedProportions;
  s.pi = {0.0, 0.75, 0.0, 0.25};
  out.push_back(s);
  s = {};
  s.kind = StrategyKind::TargetDateFund;
  s.exposed = {0, 0, 0.5, 0.5};
  s.rest = {0.5, 0.5, 0, 0};
  s.a = 0.6;
  s.b = 0.01;
  out.push_back(s);
  s = {};
  s.kind = StrategyKind::CPPI;
  s.exposed = unit(3);
  s.rest = unit(1);
  s.m = 2.0;
  s.r = 0.03;
  out.push_back(s);
  s = {};
  s.kind = StrategyKind::TermSpread;
  s.exposed = unit(1);
  s.rest = unit(0);
  s.a = -0.5;
  s.b = 5.0;
  out.push_back(s);
  s = {};
  s.kind = StrategyKind::CreditSpread;
  s.exposed = unit(2);
  s.rest = unit(1);
  s.a = 1.4;
  s.b = 2.0;
  out.push_back(s);
  s = {};
  s.kind = StrategyKind::SurvivalIndex;
  s.exposed = unit(1);
  s.rest = unit(3);
  s.a = 1.0;
  out.push_back(s);
  s = {};
  s.kind = StrategyKind::Wealth;
  s.exposed = unit(1);
  s.rest = {0.5, 0, 0, 0.5};
  s.a = 0.8;
  out.push_back(s);
  return out;
}

}  // namespace alm::support
