#pragma once

// Joint mortality / economic risk-factor dynamics, bond and equity returns, and
// scenario generation with Latin hypercube sampled shocks.

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "alm/mortality.hpp"

namespace alm::economy {

inline constexpr std::size_t kStateDim = 8;
inline constexpr std::size_t kAssets = 4;

using Shock = std::array<double, kStateDim>;
using Matrix8 = std::array<std::array<double, kStateDim>, kStateDim>;

struct EconState {
  double v1 = 0.0;
  double v2 = 0.0;
  double v3 = 0.0;
  double g = 0.0;    // log per-capita real GDP
  double sT = 0.0;   // term spread, log Y2 - log Y1
  double sC = 0.0;   // log credit spread, log(log Y3 - log Y2)
  double y1 = 0.0;   // log of the 1-year yield
  double sE = 0.0;   // log equity total-return index

  mortality::RiskFactors risk_factors() const { return {v1, v2, v3}; }
  Shock as_array() const { return {v1, v2, v3, g, sT, sC, y1, sE}; }
  static EconState from_array(const Shock& x) {
    return {x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7]};
  }
  friend bool operator==(const EconState&, const EconState&) = default;
};

// Sparse drift matrix and intercepts of the eight-equation system.
struct DriftCoefficients {
  double a11 = 0.0;
  double a33 = 0.0;
  double a34 = 0.0;
  double a45 = 0.0;
  double a46 = 0.0;
  double a55 = 0.0;
  double a66 = 0.0;
  double a77 = 0.0;
};

struct ModelCoefficients {
  DriftCoefficients a;
  std::array<double, kStateDim> b{};
  Matrix8 shock_cov{};
  double delta_t = 1.0;

  // Throws ConfigError / FactorizationError when invalid.
  void validate() const;
};

struct YieldCurvePoint {
  double Y1 = 0.0;  // 1-year government
  double Y2 = 0.0;  // 5-year government
  double Y3 = 0.0;  // corporate
};

struct Durations {
  double short_gov = 1.0;
  double long_gov = 5.0;
  double corporate = 5.0;
};

using Returns = std::array<double, kAssets>;

// One sampled path. Time index t runs 0..T; returns[t-1] is the gross return
// over [t-1, t]. claims[0] is the (unpaid) value at t = 0.
struct Scenario {
  std::vector<Returns> returns;   // T rows
  std::vector<double> claims;     // c_0..c_T
  std::vector<double> survival;   // S_0..S_T
  std::vector<double> sT;         // term spread, t = 0..T
  std::vector<double> sC;         // log credit spread, t = 0..T
  std::vector<double> y1;         // log 1-year yield, t = 0..T

  std::size_t horizon() const { return returns.size(); }
  // Same paths with c_t = 0.
  Scenario without_claims() const;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

EconState step_state(const EconState& s, const ModelCoefficients& coeffs, const Shock& shock);

YieldCurvePoint yields_from_state(const EconState& s);

// Inverse of yields_from_state for the three yield coordinates.
void encode_yields(const YieldCurvePoint& y, EconState& s);

Returns asset_returns(const YieldCurvePoint& prev, const YieldCurvePoint& curr, double prev_sE,
                      double curr_sE, double delta_t = 1.0, const Durations& dur = {});

// Lower Cholesky factor of a symmetric PSD matrix. Zero pivots yield zero
// columns; a negative pivot beyond round-off throws FactorizationError.
Matrix8 cholesky_psd(const Matrix8& cov);

// Standard normal quantile.
double normal_quantile(double u);
double normal_cdf(double x);

enum class Sampling { LatinHypercube, Iid };

// n x 8 correlated normal shocks. LatinHypercube: every column of the
// underlying standard normals has exactly one point in each of the n
// equiprobable strata.
std::vector<Shock> lhs_normals(std::size_t n, const Matrix8& cov, std::mt19937_64& rng);

// Uncorrelated standard normals before the Cholesky map; exposed for testing.
std::vector<Shock> lhs_standard_normals(std::size_t n, std::mt19937_64& rng);

std::vector<Shock> iid_normals(std::size_t n, const Matrix8& cov, std::mt19937_64& rng);

struct SimulationSettings {
  std::size_t n = 10000;
  std::size_t horizon = 30;
  std::uint64_t seed = 1;
  Sampling sampling = Sampling::LatinHypercube;
  int cohort_age = 65;
};

// Shocks are drawn one period at a time as an n x 8 sample, so that the
// stratification holds across scenarios within each period. Claims are the
// survival index of the cohort aged `cohort_age` at t = 0.
std::vector<Scenario> generate_scenarios(const EconState& init, const ModelCoefficients& coeffs,
                                         const SimulationSettings& sim,
                                         const Durations& dur = {});

}  // namespace alm::economy
