#include "alm/model_config.hpp"

#include "alm/error.hpp"
#include "alm/ini.hpp"

namespace alm {

ModelConfig parse_model_config(const std::string& text) {
  const ini::Tree tree = ini::parse(text);
  ModelConfig cfg;

  const auto& coef = ini::section(tree, "coefficients");
  auto& a = cfg.coeffs.a;
  a.a11 = ini::get_double(coef, "a11");
  a.a33 = ini::get_double(coef, "a33");
  a.a34 = ini::get_double(coef, "a34");
  a.a45 = ini::get_double(coef, "a45");
  a.a46 = ini::get_double(coef, "a46");
  a.a55 = ini::get_double(coef, "a55");
  a.a66 = ini::get_double(coef, "a66");
  a.a77 = ini::get_double(coef, "a77");
  for (std::size_t i = 0; i < economy::kStateDim; ++i) {
    cfg.coeffs.b[i] = ini::get_double(coef, "b" + std::to_string(i + 1));
  }
  cfg.coeffs.delta_t = ini::get_double(coef, "delta_t", 1.0);
  cfg.durations.short_gov = ini::get_double(coef, "duration1", 1.0);
  cfg.durations.long_gov = ini::get_double(coef, "duration2", 5.0);
  cfg.durations.corporate = ini::get_double(coef, "duration3", 5.0);

  const auto& init = ini::section(tree, "initial_state");
  auto& s = cfg.initial_state;
  s.v1 = ini::get_double(init, "v1");
  s.v2 = ini::get_double(init, "v2");
  s.v3 = ini::get_double(init, "v3");
  s.g = ini::get_double(init, "g");
  s.sT = ini::get_double(init, "sT");
  s.sC = ini::get_double(init, "sC");
  s.y1 = ini::get_double(init, "y1");
  s.sE = ini::get_double(init, "sE");

  const auto& cov = ini::section(tree, "shock_cov");
  for (std::size_t i = 0; i < economy::kStateDim; ++i) {
    const auto row = ini::get_doubles(cov, "row" + std::to_string(i + 1));
    if (row.size() != economy::kStateDim) {
      throw ConfigError("[shock_cov] row" + std::to_string(i + 1) + ": expected 8 values");
    }
    std::copy(row.begin(), row.end(), cfg.coeffs.shock_cov[i].begin());
  }

  if (auto sim = tree.get_child_optional("simulation")) {
    auto& out = cfg.simulation;
    out.n = static_cast<std::size_t>(ini::get_double(*sim, "n", static_cast<double>(out.n)));
    out.horizon = static_cast<std::size_t>(ini::get_double(*sim, "T", static_cast<double>(out.horizon)));
    out.seed = sim->get<std::uint64_t>("seed", out.seed);
    out.cohort_age = static_cast<int>(ini::get_double(*sim, "cohort_age", out.cohort_age));
    const auto mode = sim->get<std::string>("sampling", "lhs");
    if (mode == "lhs") {
      out.sampling = economy::Sampling::LatinHypercube;
    } else if (mode == "iid") {
      out.sampling = economy::Sampling::Iid;
    } else {
      throw ConfigError("[simulation] sampling must be lhs or iid, got '" + mode + "'");
    }
  }

  cfg.coeffs.validate();
  return cfg;
}

ModelConfig load_model_config(const std::filesystem::path& path) {
  return parse_model_config(ini::slurp(path));
}

}  // namespace alm
