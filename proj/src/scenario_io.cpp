#include "alm/scenario_io.hpp"

#include <fstream>
#include <ostream>
#include <string>

#include "alm/csv.hpp"
#include "alm/error.hpp"

namespace alm {

using economy::Scenario;

void write_scenarios_csv(std::ostream& out, const std::vector<Scenario>& scenarios) {
  out << "scenario,t,R1,R2,R3,R4,claim,S,sT,sC,y1\n";
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    const auto& s = scenarios[k];
    for (std::size_t t = 0; t <= s.horizon(); ++t) {
      out << k << ',' << t;
      for (std::size_t j = 0; j < economy::kAssets; ++j) {
        out << ',';
        if (t > 0) out << csv::format_double(s.returns[t - 1][j]);
      }
      out << ',' << csv::format_double(s.claims[t]) << ',' << csv::format_double(s.survival[t])
          << ',' << csv::format_double(s.sT[t]) << ',' << csv::format_double(s.sC[t]) << ','
          << csv::format_double(s.y1[t]) << '\n';
    }
  }
}

void save_scenarios(const std::filesystem::path& path, const std::vector<Scenario>& scenarios) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  write_scenarios_csv(out, scenarios);
}

std::vector<Scenario> load_scenarios(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  const std::size_t c_scn = table.column("scenario");
  const std::size_t c_t = table.column("t");
  const std::size_t c_r[4] = {table.column("R1"), table.column("R2"), table.column("R3"),
                              table.column("R4")};
  const std::size_t c_claim = table.column("claim");
  const std::size_t c_s = table.column("S");
  const std::size_t c_st = table.column("sT");
  const std::size_t c_sc = table.column("sC");
  const std::size_t c_y1 = table.column("y1");

  std::vector<Scenario> out;
  for (const auto& row : table.rows) {
    const auto k = static_cast<std::size_t>(csv::parse_double(row[c_scn]));
    const auto t = static_cast<std::size_t>(csv::parse_double(row[c_t]));
    if (k == out.size()) out.emplace_back();
    if (k + 1 != out.size()) throw ConfigError("scenarios csv: scenario ids must be contiguous");
    auto& s = out.back();
    if (t != s.claims.size()) throw ConfigError("scenarios csv: t must run 0..T in order");
    if (t > 0) {
      economy::Returns r{};
      for (std::size_t j = 0; j < economy::kAssets; ++j) r[j] = csv::parse_double(row[c_r[j]]);
      s.returns.push_back(r);
    }
    s.claims.push_back(csv::parse_double(row[c_claim]));
    s.survival.push_back(csv::parse_double(row[c_s]));
    s.sT.push_back(csv::parse_double(row[c_st]));
    s.sC.push_back(csv::parse_double(row[c_sc]));
    s.y1.push_back(csv::parse_double(row[c_y1]));
  }
  if (out.empty()) throw ConfigError("scenarios csv: no rows in " + path.string());
  const auto horizon = out.front().horizon();
  for (const auto& s : out) {
    if (s.horizon() != horizon) throw ConfigError("scenarios csv: ragged horizons");
  }
  return out;
}

}  // namespace alm
