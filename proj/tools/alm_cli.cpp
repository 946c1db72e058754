// Experiment driver: scenarios -> basis strategies -> optimal diversification.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <iostream>
#include <sstream>

#include "alm/catalogue.hpp"
#include "alm/csv.hpp"
#include "alm/experiment.hpp"
#include "alm/model_config.hpp"
#include "alm/mortality.hpp"
#include "alm/scenario_io.hpp"

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& tok : alm::csv::split(text, ',')) out.push_back(alm::csv::parse_double(tok));
  return out;
}

int fit_mortality(const std::string& path) {
  const auto data = alm::mortality::read_mortality_csv(path);
  const auto v = alm::mortality::fit_risk_factors(data);
  std::cout << "v1,v2,v3\n"
            << alm::csv::format_double(v.v1) << ',' << alm::csv::format_double(v.v2) << ','
            << alm::csv::format_double(v.v3) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Longevity-linked asset-liability management experiments"};

  std::string config_path = "config/default_model.ini";
  std::string catalogue_path = "config/default_catalogue.ini";
  std::string out_dir = "out";
  std::string gammas = "0.05,0.1,0.3,0.5";
  std::string load_path, save_path, fit_path;
  std::optional<std::size_t> n_scenarios;
  std::optional<std::uint64_t> seed;
  std::size_t top_k = 5;
  unsigned threads = 0;

  app.add_option("--config", config_path, "Model configuration (INI)");
  app.add_option("--catalogue", catalogue_path, "Strategy catalogue configuration (INI)");
  app.add_option("--scenarios", n_scenarios, "Number of scenarios (overrides the config)");
  app.add_option("--seed", seed, "Random seed (overrides the config)");
  app.add_option("--gammas", gammas, "Comma-separated risk-aversion values");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--load-scenarios", load_path, "Read scenarios from CSV instead of simulating");
  app.add_option("--save-scenarios", save_path, "Write the simulated scenarios to CSV");
  app.add_option("--top-k", top_k, "Number of best basis strategies to report");
  app.add_option("--threads", threads, "Worker threads for strategy evaluation (0 = all cores)");
  app.add_option("--fit-mortality", fit_path,
                 "Fit risk factors to an age,exposure,deaths CSV and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!fit_path.empty()) return fit_mortality(fit_path);

    auto model = alm::load_model_config(config_path);
    if (n_scenarios) model.simulation.n = *n_scenarios;
    if (seed) model.simulation.seed = *seed;

    alm::ExperimentPlan plan;
    plan.gammas = parse_list(gammas);
    plan.n_scenarios = model.simulation.n;
    plan.seed = model.simulation.seed;
    plan.horizon = model.simulation.horizon;
    plan.top_k = top_k;
    plan.threads = threads;
    plan.validate();

    std::vector<alm::economy::Scenario> scenarios;
    if (!load_path.empty()) {
      scenarios = alm::load_scenarios(load_path);
      plan.n_scenarios = scenarios.size();
      plan.horizon = scenarios.front().horizon();
      std::cerr << "loaded " << scenarios.size() << " scenarios from " << load_path << '\n';
    } else {
      scenarios = alm::economy::generate_scenarios(model.initial_state, model.coeffs,
                                                   model.simulation, model.durations);
      std::cerr << "simulated " << scenarios.size() << " scenarios, T = " << plan.horizon << '\n';
    }
    if (!save_path.empty()) alm::save_scenarios(save_path, scenarios);

    const auto cat = alm::build_catalogue(alm::load_catalogue_config(catalogue_path), plan.horizon);
    for (const auto& r : cat.rejected) std::cerr << "rejected: " << r << '\n';
    std::cerr << "catalogue: " << cat.non_ldi_count() << " non-LDI, " << cat.size() << " total\n";

    const auto report = alm::run_experiment(plan, cat, scenarios);
    alm::write_report(out_dir, plan, cat, report);

    int failures = 0;
    for (const auto& c : report.cells) {
      if (!c.ok) {
        ++failures;
        std::cerr << "cell " << c.label() << " failed: " << c.error << '\n';
      }
    }
    std::ifstream txt(std::filesystem::path(out_dir) / "report.txt");
    std::cout << txt.rdbuf();
    return failures == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
