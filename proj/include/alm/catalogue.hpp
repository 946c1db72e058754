#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "alm/strategies.hpp"

namespace alm {

// Parameter grids per strategy family, one INI section each:
//   [buy_and_hold]        allocations = 1 0 0 0 | 0 1 0 0 | ...
//   [fixed_proportions]   pairs = 2/4 2/3 (safe/risky asset), risky_shares = ...
//   [target_date]         risky, safe (within-group mixes), a, b
//   [cppi]                risky, safe, m, r
//   [term_spread]         long, short (asset numbers 1..4), a, b
//   [credit_spread]       risky, safer (asset numbers), a, b
//   [survival_index]      target (asset number), rest (mixes), a
//   [wealth]              target, rest, a
// Grids expand as Cartesian products. Missing sections contribute nothing.
struct CatalogueConfig {
  std::vector<strategies::Weights> buy_and_hold;
  std::vector<std::pair<int, int>> fp_pairs;
  std::vector<double> fp_shares;

  strategies::Weights tdf_risky{0, 0, 0, 1};
  strategies::Weights tdf_safe{0, 1, 0, 0};
  std::vector<double> tdf_a, tdf_b;

  strategies::Weights cppi_risky{0, 0, 0, 1};
  strategies::Weights cppi_safe{0, 1, 0, 0};
  std::vector<double> cppi_m, cppi_r;

  int term_long = 2, term_short = 1;
  std::vector<double> term_a, term_b;

  int credit_risky = 3, credit_safer = 2;
  std::vector<double> credit_a, credit_b;

  int survival_target = 2;
  std::vector<strategies::Weights> survival_rest;
  std::vector<double> survival_a;

  int wealth_target = 2;
  std::vector<strategies::Weights> wealth_rest;
  std::vector<double> wealth_a;
};

CatalogueConfig parse_catalogue_config(const std::string& text);
CatalogueConfig load_catalogue_config(const std::filesystem::path& path);

struct CatalogueEntry {
  int id = 0;  // 1-based, stable across runs
  strategies::StrategySpec spec;
};

// Non-liability-driven families come first, so that set is a prefix.
struct Catalogue {
  std::vector<CatalogueEntry> entries;
  std::vector<std::string> rejected;  // infeasible grid points, with reasons

  std::size_t non_ldi_count() const;
  std::size_t size() const { return entries.size(); }
};

Catalogue build_catalogue(const CatalogueConfig& cfg, std::size_t horizon);

// CSV `id,kind,params`.
void write_catalogue_csv(std::ostream& out, const Catalogue& cat);

}  // namespace alm
