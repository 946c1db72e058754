#include "alm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "alm/csv.hpp"
#include "alm/error.hpp"

namespace alm {

using economy::Scenario;
using riskopt::TerminalWealthMatrix;

namespace {

constexpr std::size_t kLongBond = 1;  // asset 2, 0-based

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const std::size_t chunk = (count + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        for (std::size_t k = lo; k < hi; ++k) fn(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> rank(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

std::string fixed(double x, int digits) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << x;
  return ss.str();
}

std::string gamma_tag(double g) { return csv::format_double(g); }

}  // namespace

std::string_view set_label(StrategySet set) {
  return set == StrategySet::NonLdi ? "non_ldi" : "all";
}

void ExperimentPlan::validate() const {
  if (gammas.empty() || strategy_sets.empty() || liability_modes.empty()) {
    throw ConfigError("experiment plan: gammas, strategy sets and liability modes must be non-empty");
  }
  for (double g : gammas) {
    if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError("experiment plan: gamma must be positive");
  }
  if (n_scenarios == 0) throw ConfigError("experiment plan: need at least one scenario");
}

std::string CellResult::label() const {
  return std::string(liabilities ? "with" : "without") + "_" + std::string(set_label(set)) + "_g" +
         gamma_tag(gamma);
}

const CellResult* RunReport::find(double gamma, StrategySet set, bool liabilities) const {
  for (const auto& c : cells) {
    if (c.gamma == gamma && c.set == set && c.liabilities == liabilities) return &c;
  }
  return nullptr;
}

std::optional<double> RunReport::reduction_percent(double gamma, bool liabilities) const {
  const auto* base = find(gamma, StrategySet::NonLdi, liabilities);
  const auto* all = find(gamma, StrategySet::All, liabilities);
  if (!base || !all || !base->ok || !all->ok || base->rho == 0.0) return std::nullopt;
  return 100.0 * (base->rho - all->rho) / std::abs(base->rho);
}

double rank_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("rank_correlation: length mismatch");
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

ScatterResult scatter_extract(std::span<const double> alpha,
                              std::span<const strategies::StrategySpec> specs,
                              std::span<const Scenario> scenarios,
                              const strategies::PropagationSettings& settings, std::size_t t) {
  if (alpha.size() != specs.size()) throw DomainError("scatter_extract: one weight per strategy");
  ScatterResult out;
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    if (t > scenarios[k].horizon()) throw DomainError("scatter_extract: t beyond horizon");
    double wealth = 0.0;
    double bond = 0.0;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      if (alpha[i] == 0.0) continue;
      const auto path = strategies::propagate_wealth(specs[i], scenarios[k], settings);
      wealth += alpha[i] * path.wealth[t];
      bond += alpha[i] * path.holdings[t][kLongBond];
    }
    if (wealth == 0.0) {
      ++out.excluded;
      continue;
    }
    out.points.push_back({k, wealth, bond / wealth});
  }
  return out;
}

WealthMatrices build_wealth_matrices(const Catalogue& cat, std::span<const Scenario> scenarios,
                                     const strategies::PropagationSettings& settings,
                                     std::size_t snapshot_time, unsigned threads) {
  const std::size_t n = scenarios.size();
  const std::size_t m = cat.size();
  WealthMatrices out{TerminalWealthMatrix(n, m), TerminalWealthMatrix(n, m),
                     TerminalWealthMatrix(n, m)};
  parallel_for(n, threads, [&](std::size_t k) {
    const auto& scn = scenarios[k];
    const std::size_t snap = std::min(snapshot_time, scn.horizon());
    for (std::size_t i = 0; i < m; ++i) {
      const auto path = strategies::propagate_wealth(cat.entries[i].spec, scn, settings);
      out.terminal(k, i) = path.wealth.back();
      out.wealth_at(k, i) = path.wealth[snap];
      out.long_bond_at(k, i) = path.holdings[snap][kLongBond];
    }
  });
  return out;
}

RunReport run_experiment(const ExperimentPlan& plan, const Catalogue& cat,
                         const std::vector<Scenario>& scenarios) {
  plan.validate();
  if (scenarios.empty()) throw ConfigError("run_experiment: no scenarios");
  if (cat.size() == 0) throw ConfigError("run_experiment: empty catalogue");

  RunReport report;
  report.n_scenarios = scenarios.size();
  const std::size_t horizon = scenarios.front().horizon();
  const bool scatter_ok = plan.scatter_time <= horizon;

  std::vector<int> all_ids;
  for (const auto& e : cat.entries) all_ids.push_back(e.id);

  for (const bool liabilities : plan.liability_modes) {
    std::vector<Scenario> without;
    if (!liabilities) {
      without.reserve(scenarios.size());
      for (const auto& s : scenarios) without.push_back(s.without_claims());
    }
    const std::vector<Scenario>& scns = liabilities ? scenarios : without;

    strategies::PropagationSettings settings;
    settings.initial_wealth = plan.initial_wealth;
    settings.borrow_margin = plan.borrow_margin;
    settings.median_claims = strategies::median_claims(scns);
    const auto mats = build_wealth_matrices(cat, scns, settings, plan.scatter_time, plan.threads);

    auto finish = [&](CellResult& cell, std::size_t count, std::vector<double> alpha) {
      const auto w = mats.terminal.leading_columns(count);
      cell.alpha = std::move(alpha);
      cell.mixed_wealth = w.mix(cell.alpha);
      cell.rho = riskopt::entropic_risk(cell.mixed_wealth, cell.gamma);
      cell.residual = riskopt::simplex_gap(cell.alpha,
                                           riskopt::diversified_objective(cell.alpha, w, cell.gamma).gradient);
      cell.top = riskopt::rank_strategies(w, cell.gamma, std::min(plan.top_k, count), cell.ids);
      cell.scatter = {};
      if (scatter_ok) {
        const auto wt = mats.wealth_at.leading_columns(count).mix(cell.alpha);
        const auto ht = mats.long_bond_at.leading_columns(count).mix(cell.alpha);
        for (std::size_t k = 0; k < wt.size(); ++k) {
          if (wt[k] == 0.0) {
            ++cell.scatter.excluded;
            continue;
          }
          cell.scatter.points.push_back({k, wt[k], ht[k] / wt[k]});
        }
      }
    };

    const std::size_t first = report.cells.size();
    for (const StrategySet set : plan.strategy_sets) {
      const std::size_t count = set == StrategySet::All ? cat.size() : cat.non_ldi_count();
      for (const double gamma : plan.gammas) {
        CellResult cell;
        cell.gamma = gamma;
        cell.set = set;
        cell.liabilities = liabilities;
        cell.ids.assign(all_ids.begin(), all_ids.begin() + static_cast<std::ptrdiff_t>(count));
        try {
          if (count == 0) throw ConfigError("strategy set is empty");
          const auto opt = riskopt::optimize_weights(mats.terminal.leading_columns(count), gamma,
                                                     plan.optimizer);
          cell.iterations = opt.iterations;
          finish(cell, count, opt.alpha);
          cell.ok = true;
        } catch (const std::exception& e) {
          cell.ok = false;
          cell.error = e.what();
        }
        report.cells.push_back(std::move(cell));
      }
    }

    // The non-LDI optimum is feasible for the full set, so the full set never reports worse.
    for (std::size_t a = first; a < report.cells.size(); ++a) {
      auto& all = report.cells[a];
      if (all.set != StrategySet::All || !all.ok) continue;
      for (std::size_t b = first; b < report.cells.size(); ++b) {
        const auto& base = report.cells[b];
        if (base.set != StrategySet::NonLdi || !base.ok || base.gamma != all.gamma) continue;
        if (base.rho < all.rho) {
          std::vector<double> padded(all.ids.size(), 0.0);
          std::copy(base.alpha.begin(), base.alpha.end(), padded.begin());
          finish(all, all.ids.size(), std::move(padded));
        }
      }
    }
  }
  return report;
}

void write_objective_csv(std::ostream& out, const RunReport& report) {
  out << "gamma,set,liabilities,rho\n";
  for (const auto& c : report.cells) {
    out << csv::format_double(c.gamma) << ',' << set_label(c.set) << ','
        << (c.liabilities ? "with" : "without") << ',' << (c.ok ? csv::format_double(c.rho) : "")
        << '\n';
  }
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write " + p.string());
  return out;
}

std::string describe(const Catalogue& cat, int id) {
  const auto& e = cat.entries.at(static_cast<std::size_t>(id - 1));
  return std::string(strategies::kind_name(e.spec.kind)) + " " + e.spec.params_string();
}

void write_text_report(std::ostream& out, const ExperimentPlan& plan, const Catalogue& cat,
                       const RunReport& report) {
  out << "Scenarios: " << report.n_scenarios << ", w0 = " << csv::format_double(plan.initial_wealth)
      << ", strategies: " << cat.non_ldi_count() << " non-LDI / " << cat.size() << " all\n\n";

  out << "Optimal objective rho\n";
  out << std::left << std::setw(16) << "";
  for (double g : plan.gammas) {
    for (bool liab : plan.liability_modes) {
      out << std::right << std::setw(14)
          << ("g=" + gamma_tag(g) + (liab ? " c=S" : " c=0"));
    }
  }
  out << '\n';
  for (const StrategySet set : plan.strategy_sets) {
    out << std::left << std::setw(16) << (set == StrategySet::NonLdi ? "Non-LDI" : "All");
    for (double g : plan.gammas) {
      for (bool liab : plan.liability_modes) {
        const auto* c = report.find(g, set, liab);
        out << std::right << std::setw(14) << (c && c->ok ? fixed(c->rho, 4) : "failed");
      }
    }
    out << '\n';
  }
  out << std::left << std::setw(16) << "reduction (%)";
  for (double g : plan.gammas) {
    for (bool liab : plan.liability_modes) {
      const auto r = report.reduction_percent(g, liab);
      out << std::right << std::setw(14) << (r ? fixed(*r, 4) : "-");
    }
  }
  out << "\n\n";

  for (const auto& c : report.cells) {
    out << "Cell " << c.label() << '\n';
    if (!c.ok) {
      out << "  FAILED: " << c.error << "\n\n";
      continue;
    }
    out << "  rho = " << fixed(c.rho, 6) << ", certificate residual = " << c.residual
        << ", iterations = " << c.iterations << '\n';
    std::vector<std::size_t> order(c.alpha.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return c.alpha[a] > c.alpha[b]; });
    out << "  Diversified strategy (weights >= 0.1%)\n";
    for (std::size_t i : order) {
      if (c.alpha[i] < 1e-3) break;
      out << "    " << std::right << std::setw(6) << fixed(100.0 * c.alpha[i], 1) << "%  #"
          << c.ids[i] << ' ' << describe(cat, c.ids[i]) << '\n';
    }
    out << "  Best basis strategies\n";
    for (const auto& r : c.top) {
      out << "    " << std::right << std::setw(10) << fixed(r.rho, 4) << "  #" << r.id << ' '
          << describe(cat, r.id) << '\n';
    }
    if (!c.scatter.points.empty()) {
      std::vector<double> w, p;
      for (const auto& pt : c.scatter.points) {
        w.push_back(pt.wealth);
        p.push_back(pt.long_bond_share);
      }
      out << "  Scatter at t=" << plan.scatter_time << ": " << c.scatter.points.size()
          << " points, " << c.scatter.excluded << " excluded, rank correlation "
          << fixed(rank_correlation(w, p), 4) << '\n';
    }
    out << '\n';
  }
  if (!cat.rejected.empty()) {
    out << "Rejected catalogue entries\n";
    for (const auto& r : cat.rejected) out << "  " << r << '\n';
  }
}

}  // namespace

void write_report(const std::filesystem::path& dir, const ExperimentPlan& plan,
                  const Catalogue& cat, const RunReport& report) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / "objective.csv");
    write_objective_csv(out, report);
  }
  {
    auto out = open_out(dir / "catalogue.csv");
    write_catalogue_csv(out, cat);
  }
  auto summary = open_out(dir / "scatter_summary.csv");
  summary << "cell,points,excluded,rank_correlation\n";
  for (const auto& c : report.cells) {
    if (!c.ok) continue;
    const std::string label = c.label();
    {
      auto out = open_out(dir / ("weights_" + label + ".csv"));
      out << "id,alpha\n";
      for (std::size_t i = 0; i < c.alpha.size(); ++i) {
        out << c.ids[i] << ',' << csv::format_double(c.alpha[i]) << '\n';
      }
    }
    {
      auto out = open_out(dir / ("topk_" + label + ".csv"));
      out << "rank,id,rho\n";
      for (std::size_t r = 0; r < c.top.size(); ++r) {
        out << r + 1 << ',' << c.top[r].id << ',' << csv::format_double(c.top[r].rho) << '\n';
      }
    }
    {
      auto out = open_out(dir / ("scatter_" + label + ".csv"));
      out << "scenario,wealth,pi2\n";
      std::vector<double> w, p;
      for (const auto& pt : c.scatter.points) {
        out << pt.scenario << ',' << csv::format_double(pt.wealth) << ','
            << csv::format_double(pt.long_bond_share) << '\n';
        w.push_back(pt.wealth);
        p.push_back(pt.long_bond_share);
      }
      summary << label << ',' << c.scatter.points.size() << ',' << c.scatter.excluded << ','
              << (w.size() >= 2 ? csv::format_double(rank_correlation(w, p)) : "") << '\n';
    }
  }
  auto out = open_out(dir / "report.txt");
  write_text_report(out, plan, cat, report);
}

}  // namespace alm
