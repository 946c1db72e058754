#include "alm/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "alm/csv.hpp"
#include "alm/error.hpp"

namespace alm::strategies {

namespace {

bool is_mix(const Weights& w) {
  double sum = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) return false;
    sum += x;
  }
  return std::abs(sum - 1.0) <= 1e-12;
}

Weights blend(double e, const Weights& exposed, const Weights& rest) {
  Weights pi{};
  for (std::size_t j = 0; j < kAssets; ++j) pi[j] = e * exposed[j] + (1.0 - e) * rest[j];
  return pi;
}

std::string mix_string(const Weights& w) {
  std::string s;
  for (std::size_t j = 0; j < kAssets; ++j) {
    if (j) s += ':';
    s += csv::format_double(w[j]);
  }
  return s;
}

// Shared recursion behind propagate_wealth and terminal_wealth.
template <typename Record>
double run_path(const StrategySpec& spec, const economy::Scenario& scn,
                const PropagationSettings& settings, Record&& record) {
  const std::size_t horizon = scn.horizon();
  const double w0 = settings.initial_wealth;

  std::vector<double> floor;
  if (spec.kind == StrategyKind::CPPI && !settings.median_claims.empty()) {
    if (settings.median_claims.size() != horizon) {
      throw ConfigError("propagate_wealth: median claims do not match the scenario horizon");
    }
    floor = cppi_floor(settings.median_claims, spec.r).floor;
  }

  auto observe = [&](std::size_t t, double w) {
    Observation obs;
    obs.t = t;
    obs.wealth = w;
    obs.initial_wealth = w0;
    obs.survival = scn.survival[t];
    obs.term_spread = scn.sT[t];
    obs.credit_spread = scn.sC[t];
    obs.floor = floor.empty() ? 0.0 : floor[t];
    return obs;
  };

  auto invest = [&](std::size_t t, double w) {
    Holdings h{};
    const Weights pi = spec.kind == StrategyKind::BuyAndHold ? spec.pi : allocate(spec, observe(t, w));
    for (std::size_t j = 0; j < kAssets; ++j) h[j] = pi[j] * w;
    return h;
  };

  Holdings h = w0 < 0.0 ? Holdings{0, 0, 0, 0, w0} : invest(0, w0);
  record(0, w0, h);
  double w = w0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const auto& ret = scn.returns[t - 1];
    const double claim = scn.claims[t];
    double gross = h[kLoanLeg] * loan_return(scn, t, settings.borrow_margin);
    for (std::size_t j = 0; j < kAssets; ++j) gross += ret[j] * h[j];
    w = gross - claim;

    const bool was_borrowing = h[kLoanLeg] != 0.0;
    Holdings next{};
    if (w < 0.0) {
      next[kLoanLeg] = w;
    } else if (spec.kind == StrategyKind::BuyAndHold && !was_borrowing) {
      for (std::size_t j = 0; j < kAssets; ++j) next[j] = ret[j] * h[j] - spec.pi[j] * claim;
    } else {
      next = invest(t, w);
    }
    h = next;
    record(t, w, h);
  }
  return w;
}

}  // namespace

std::string_view kind_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::BuyAndHold: return "BuyAndHold";
    case StrategyKind::FixedProportions: return "FixedProportions";
    case StrategyKind::TargetDateFund: return "TargetDateFund";
    case StrategyKind::CPPI: return "CPPI";
    case StrategyKind::TermSpread: return "TermSpread";
    case StrategyKind::CreditSpread: return "CreditSpread";
    case StrategyKind::SurvivalIndex: return "SurvivalIndex";
    case StrategyKind::Wealth: return "Wealth";
  }
  return "Unknown";
}

bool is_liability_driven(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::BuyAndHold:
    case StrategyKind::FixedProportions:
    case StrategyKind::TargetDateFund:
      return false;
    default:
      return true;
  }
}

void StrategySpec::validate(std::size_t horizon) const {
  const std::string name(kind_name(kind));
  switch (kind) {
    case StrategyKind::BuyAndHold:
    case StrategyKind::FixedProportions:
      if (!is_mix(pi)) throw ConfigError(name + ": proportions must be nonnegative and sum to 1");
      return;
    default:
      break;
  }
  if (!is_mix(exposed) || !is_mix(rest)) {
    throw ConfigError(name + ": within-group proportions must be nonnegative and sum to 1");
  }
  for (std::size_t j = 0; j < kAssets; ++j) {
    if (exposed[j] > 0.0 && rest[j] > 0.0) {
      throw ConfigError(name + ": exposed and remaining asset groups must be disjoint");
    }
  }
  switch (kind) {
    case StrategyKind::TargetDateFund:
      if (!(a >= 0.0) || a > 1.0 || !(a - b * static_cast<double>(horizon) >= 0.0)) {
        throw ConfigError(name + " a=" + csv::format_double(a) + ", b=" + csv::format_double(b) +
                          ": infeasible, need 0 <= a <= 1 and a - b*T >= 0 with T=" +
                          std::to_string(horizon));
      }
      if (b < 0.0) throw ConfigError(name + ": b must be nonnegative");
      break;
    case StrategyKind::CPPI:
      if (!(m >= 0.0)) throw ConfigError(name + ": multiplier m must be nonnegative");
      if (!(r > -1.0)) throw ConfigError(name + ": discount rate must exceed -1");
      break;
    case StrategyKind::TermSpread:
    case StrategyKind::CreditSpread:
      if (!(b > 0.0)) throw ConfigError(name + ": slope b must be positive");
      if (!std::isfinite(a)) throw ConfigError(name + ": a must be finite");
      break;
    case StrategyKind::SurvivalIndex:
    case StrategyKind::Wealth:
      if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError(name + ": a must be nonnegative");
      break;
    default:
      break;
  }
}

std::string StrategySpec::params_string() const {
  std::ostringstream ss;
  auto num = [](double x) { return csv::format_double(x); };
  switch (kind) {
    case StrategyKind::BuyAndHold:
    case StrategyKind::FixedProportions:
      ss << "pi=" << mix_string(pi);
      return ss.str();
    case StrategyKind::TargetDateFund:
      ss << "a=" << num(a) << ";b=" << num(b);
      break;
    case StrategyKind::CPPI:
      ss << "m=" << num(m) << ";r=" << num(r);
      break;
    case StrategyKind::TermSpread:
    case StrategyKind::CreditSpread:
      ss << "a=" << num(a) << ";b=" << num(b);
      break;
    case StrategyKind::SurvivalIndex:
    case StrategyKind::Wealth:
      ss << "a=" << num(a);
      break;
  }
  ss << ";exposed=" << mix_string(exposed) << ";rest=" << mix_string(rest);
  return ss.str();
}

double sigmoid(double s, double a, double b) {
  const double z = b * (s + a);
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double capped_linear(double s, double a) { return std::min(a * s, 1.0); }

double exposure(const StrategySpec& spec, const Observation& obs) {
  double e = 0.0;
  switch (spec.kind) {
    case StrategyKind::TargetDateFund:
      e = spec.a - spec.b * static_cast<double>(obs.t);
      break;
    case StrategyKind::CPPI:
      e = obs.wealth <= 0.0 ? 0.0 : spec.m * std::max(1.0 - obs.floor / obs.wealth, 0.0);
      break;
    case StrategyKind::TermSpread:
      e = sigmoid(obs.term_spread, spec.a, spec.b);
      break;
    case StrategyKind::CreditSpread:
      e = sigmoid(obs.credit_spread, spec.a, spec.b);
      break;
    case StrategyKind::SurvivalIndex:
      e = capped_linear(obs.survival, spec.a);
      break;
    case StrategyKind::Wealth:
      e = capped_linear(obs.wealth / obs.initial_wealth, spec.a);
      break;
    default:
      throw std::logic_error("exposure: family has no exposure rule");
  }
  // Long-only: a CPPI multiplier above one or a negative wealth ratio would
  // otherwise lever or short the groups.
  return std::clamp(e, 0.0, 1.0);
}

Weights allocate(const StrategySpec& spec, const Observation& obs) {
  Weights pi{};
  switch (spec.kind) {
    case StrategyKind::BuyAndHold:
      throw std::logic_error("allocate: buy-and-hold is holdings-based");
    case StrategyKind::FixedProportions:
      pi = spec.pi;
      break;
    default:
      pi = blend(exposure(spec, obs), spec.exposed, spec.rest);
      break;
  }
  const double sum = std::accumulate(pi.begin(), pi.end(), 0.0);
  if (!std::isfinite(sum) || std::abs(sum - 1.0) > 1e-9) {
    throw std::logic_error("allocate: proportions do not sum to one");
  }
  return pi;
}

FloorPath cppi_floor(std::span<const double> median_c, double r) {
  if (!(r > -1.0)) throw DomainError("cppi_floor: discount rate must exceed -1");
  FloorPath f;
  f.rate = r;
  const std::size_t horizon = median_c.size();
  f.floor.assign(horizon + 1, 0.0);
  for (std::size_t t = horizon; t >= 1; --t) {
    f.floor[t - 1] = (f.floor[t] + median_c[t - 1]) / (1.0 + r);
  }
  return f;
}

std::vector<double> median_claims(std::span<const economy::Scenario> scenarios) {
  if (scenarios.empty()) throw DomainError("median_claims: empty scenario set");
  const std::size_t horizon = scenarios.front().horizon();
  std::vector<double> out(horizon);
  std::vector<double> column(scenarios.size());
  const auto mid = (scenarios.size() - 1) / 2;
  for (std::size_t t = 1; t <= horizon; ++t) {
    for (std::size_t k = 0; k < scenarios.size(); ++k) {
      if (scenarios[k].horizon() != horizon) {
        throw DomainError("median_claims: scenarios have different horizons");
      }
      column[k] = scenarios[k].claims[t];
    }
    std::nth_element(column.begin(), column.begin() + static_cast<std::ptrdiff_t>(mid), column.end());
    out[t - 1] = column[mid];
  }
  return out;
}

double loan_return(const economy::Scenario& scn, std::size_t t, double margin) {
  return std::exp(std::exp(scn.y1[t - 1]) + margin);
}

WealthPath propagate_wealth(const StrategySpec& spec, const economy::Scenario& scn,
                            const PropagationSettings& settings) {
  WealthPath path;
  path.wealth.resize(scn.horizon() + 1);
  path.holdings.resize(scn.horizon() + 1);
  run_path(spec, scn, settings, [&](std::size_t t, double w, const Holdings& h) {
    path.wealth[t] = w;
    path.holdings[t] = h;
  });
  return path;
}

double terminal_wealth(const StrategySpec& spec, const economy::Scenario& scn,
                       const PropagationSettings& settings) {
  return run_path(spec, scn, settings, [](std::size_t, double, const Holdings&) {});
}

WealthPath mix_paths(std::span<const WealthPath> paths, std::span<const double> alpha) {
  if (paths.empty() || paths.size() != alpha.size()) {
    throw DomainError("mix_paths: need one weight per path");
  }
  const std::size_t len = paths.front().wealth.size();
  WealthPath out;
  out.wealth.assign(len, 0.0);
  out.holdings.assign(len, Holdings{});
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (paths[i].wealth.size() != len) throw DomainError("mix_paths: paths differ in length");
    for (std::size_t t = 0; t < len; ++t) {
      out.wealth[t] += alpha[i] * paths[i].wealth[t];
      for (std::size_t j = 0; j < kLegs; ++j) out.holdings[t][j] += alpha[i] * paths[i].holdings[t][j];
    }
  }
  return out;
}

}  // namespace alm::strategies
