#include "alm/catalogue.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "alm/csv.hpp"
#include "alm/error.hpp"
#include "alm/ini.hpp"

namespace alm {

using strategies::StrategyKind;
using strategies::StrategySpec;
using strategies::Weights;

namespace {

Weights parse_mix(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::vector<double> xs;
  std::string tok;
  while (in >> tok) xs.push_back(csv::parse_double(tok));
  if (xs.size() != strategies::kAssets) {
    throw ConfigError("key '" + key + "': a mix needs 4 proportions, got '" + text + "'");
  }
  return {xs[0], xs[1], xs[2], xs[3]};
}

std::vector<Weights> get_mixes(const ini::Tree& sec, const std::string& key) {
  std::vector<Weights> out;
  const auto text = ini::get_string(sec, key);
  if (!text) return out;
  std::string cleaned = *text;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  for (const auto& part : csv::split(cleaned, '|')) {
    if (part.find_first_not_of(' ') == std::string::npos) continue;
    out.push_back(parse_mix(part, key));
  }
  return out;
}

Weights get_mix(const ini::Tree& sec, const std::string& key, const Weights& fallback) {
  const auto mixes = get_mixes(sec, key);
  if (mixes.empty()) return fallback;
  if (mixes.size() != 1) throw ConfigError("key '" + key + "': expected a single mix");
  return mixes.front();
}

int get_asset(const ini::Tree& sec, const std::string& key, int fallback) {
  const double x = ini::get_double(sec, key, fallback);
  if (x != 1 && x != 2 && x != 3 && x != 4) {
    throw ConfigError("key '" + key + "': asset number must be 1..4");
  }
  return static_cast<int>(x);
}

Weights unit(int asset) {
  Weights w{};
  w[static_cast<std::size_t>(asset - 1)] = 1.0;
  return w;
}

}  // namespace

CatalogueConfig parse_catalogue_config(const std::string& text) {
  const auto tree = ini::parse(text);
  CatalogueConfig cfg;
  const ini::Tree empty;
  auto sec = [&](const char* name) -> const ini::Tree& {
    const auto child = tree.get_child_optional(name);
    return child ? *child : empty;
  };

  cfg.buy_and_hold = get_mixes(sec("buy_and_hold"), "allocations");

  const auto& fp = sec("fixed_proportions");
  if (const auto pairs = ini::get_string(fp, "pairs")) {
    std::istringstream in(*pairs);
    std::string tok;
    while (in >> tok) {
      const auto parts = csv::split(tok, '/');
      if (parts.size() != 2) throw ConfigError("fixed_proportions pairs: expected safe/risky, got " + tok);
      const int safe = static_cast<int>(csv::parse_double(parts[0]));
      const int risky = static_cast<int>(csv::parse_double(parts[1]));
      if (safe < 1 || safe > 4 || risky < 1 || risky > 4 || safe == risky) {
        throw ConfigError("fixed_proportions pairs: bad asset pair " + tok);
      }
      cfg.fp_pairs.emplace_back(safe, risky);
    }
  }
  cfg.fp_shares = ini::get_doubles(fp, "risky_shares");

  const auto& tdf = sec("target_date");
  cfg.tdf_risky = get_mix(tdf, "risky", cfg.tdf_risky);
  cfg.tdf_safe = get_mix(tdf, "safe", cfg.tdf_safe);
  cfg.tdf_a = ini::get_doubles(tdf, "a");
  cfg.tdf_b = ini::get_doubles(tdf, "b");

  const auto& cppi = sec("cppi");
  cfg.cppi_risky = get_mix(cppi, "risky", cfg.cppi_risky);
  cfg.cppi_safe = get_mix(cppi, "safe", cfg.cppi_safe);
  cfg.cppi_m = ini::get_doubles(cppi, "m");
  cfg.cppi_r = ini::get_doubles(cppi, "r");

  const auto& ts = sec("term_spread");
  cfg.term_long = get_asset(ts, "long", cfg.term_long);
  cfg.term_short = get_asset(ts, "short", cfg.term_short);
  cfg.term_a = ini::get_doubles(ts, "a");
  cfg.term_b = ini::get_doubles(ts, "b");

  const auto& cs = sec("credit_spread");
  cfg.credit_risky = get_asset(cs, "risky", cfg.credit_risky);
  cfg.credit_safer = get_asset(cs, "safer", cfg.credit_safer);
  cfg.credit_a = ini::get_doubles(cs, "a");
  cfg.credit_b = ini::get_doubles(cs, "b");

  const auto& si = sec("survival_index");
  cfg.survival_target = get_asset(si, "target", cfg.survival_target);
  cfg.survival_rest = get_mixes(si, "rest");
  cfg.survival_a = ini::get_doubles(si, "a");

  const auto& wl = sec("wealth");
  cfg.wealth_target = get_asset(wl, "target", cfg.wealth_target);
  cfg.wealth_rest = get_mixes(wl, "rest");
  cfg.wealth_a = ini::get_doubles(wl, "a");
  return cfg;
}

CatalogueConfig load_catalogue_config(const std::filesystem::path& path) {
  return parse_catalogue_config(ini::slurp(path));
}

std::size_t Catalogue::non_ldi_count() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& e) {
    return !e.spec.liability_driven();
  }));
}

Catalogue build_catalogue(const CatalogueConfig& cfg, std::size_t horizon) {
  std::vector<StrategySpec> specs;

  for (const auto& pi : cfg.buy_and_hold) {
    StrategySpec s;
    s.kind = StrategyKind::BuyAndHold;
    s.pi = pi;
    specs.push_back(s);
  }
  for (const auto& [safe, risky] : cfg.fp_pairs) {
    for (double x : cfg.fp_shares) {
      StrategySpec s;
      s.kind = StrategyKind::FixedProportions;
      s.pi[static_cast<std::size_t>(safe - 1)] = 1.0 - x;
      s.pi[static_cast<std::size_t>(risky - 1)] = x;
      specs.push_back(s);
    }
  }
  for (double a : cfg.tdf_a) {
    for (double b : cfg.tdf_b) {
      StrategySpec s;
      s.kind = StrategyKind::TargetDateFund;
      s.exposed = cfg.tdf_risky;
      s.rest = cfg.tdf_safe;
      s.a = a;
      s.b = b;
      specs.push_back(s);
    }
  }
  for (double m : cfg.cppi_m) {
    for (double r : cfg.cppi_r) {
      StrategySpec s;
      s.kind = StrategyKind::CPPI;
      s.exposed = cfg.cppi_risky;
      s.rest = cfg.cppi_safe;
      s.m = m;
      s.r = r;
      specs.push_back(s);
    }
  }
  auto spread_grid = [&](StrategyKind kind, int exposed, int rest, const std::vector<double>& as,
                         const std::vector<double>& bs) {
    for (double a : as) {
      for (double b : bs) {
        StrategySpec s;
        s.kind = kind;
        s.exposed = unit(exposed);
        s.rest = unit(rest);
        s.a = a;
        s.b = b;
        specs.push_back(s);
      }
    }
  };
  spread_grid(StrategyKind::TermSpread, cfg.term_long, cfg.term_short, cfg.term_a, cfg.term_b);
  spread_grid(StrategyKind::CreditSpread, cfg.credit_risky, cfg.credit_safer, cfg.credit_a,
              cfg.credit_b);
  auto capped_grid = [&](StrategyKind kind, int target, const std::vector<Weights>& rests,
                         const std::vector<double>& as) {
    for (const auto& rest : rests) {
      for (double a : as) {
        StrategySpec s;
        s.kind = kind;
        s.exposed = unit(target);
        s.rest = rest;
        s.a = a;
        specs.push_back(s);
      }
    }
  };
  capped_grid(StrategyKind::SurvivalIndex, cfg.survival_target, cfg.survival_rest, cfg.survival_a);
  capped_grid(StrategyKind::Wealth, cfg.wealth_target, cfg.wealth_rest, cfg.wealth_a);

  Catalogue cat;
  std::stable_partition(specs.begin(), specs.end(),
                        [](const StrategySpec& s) { return !s.liability_driven(); });
  for (const auto& s : specs) {
    try {
      s.validate(horizon);
    } catch (const ConfigError& e) {
      cat.rejected.emplace_back(e.what());
      continue;
    }
    cat.entries.push_back({static_cast<int>(cat.entries.size()) + 1, s});
  }
  return cat;
}

void write_catalogue_csv(std::ostream& out, const Catalogue& cat) {
  out << "id,kind,params\n";
  for (const auto& e : cat.entries) {
    out << e.id << ',' << strategies::kind_name(e.spec.kind) << ',' << e.spec.params_string() << '\n';
  }
}

}  // namespace alm
