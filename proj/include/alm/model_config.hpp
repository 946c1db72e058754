#pragma once

#include <filesystem>
#include <string>

#include "alm/economy.hpp"

namespace alm {

// Contents of the model configuration file: sections [coefficients],
// [initial_state], [shock_cov] (row1..row8, row-major) and [simulation].
struct ModelConfig {
  economy::ModelCoefficients coeffs;
  economy::EconState initial_state;
  economy::SimulationSettings simulation;
  economy::Durations durations;
};

ModelConfig load_model_config(const std::filesystem::path& path);
ModelConfig parse_model_config(const std::string& text);

}  // namespace alm
