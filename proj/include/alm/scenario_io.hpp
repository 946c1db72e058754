#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "alm/economy.hpp"

namespace alm {

// CSV with columns scenario,t,R1,R2,R3,R4,claim,S,sT,sC,y1; one row per
// (scenario, t) for t = 0..T. Returns are blank at t = 0. Doubles are written
// in shortest round-trip form, so save followed by load is bit-exact.
void write_scenarios_csv(std::ostream& out, const std::vector<economy::Scenario>& scenarios);
void save_scenarios(const std::filesystem::path& path,
                    const std::vector<economy::Scenario>& scenarios);
std::vector<economy::Scenario> load_scenarios(const std::filesystem::path& path);

}  // namespace alm
