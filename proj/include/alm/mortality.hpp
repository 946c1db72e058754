#pragma once

// Logistic survival model with three piecewise linear age basis functions,
// cohort propagation and per-year maximum-likelihood fitting of the risk factors.

#include <array>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

namespace alm::mortality {

inline constexpr int kMinAge = 18;
inline constexpr int kMaxAge = 100;

// Logit survival probabilities at ages 18, 50 and 100.
struct RiskFactors {
  double v1 = 0.0;
  double v2 = 0.0;
  double v3 = 0.0;

  std::array<double, 3> as_array() const { return {v1, v2, v3}; }
  friend bool operator==(const RiskFactors&, const RiskFactors&) = default;
};

struct CohortState {
  int age = 65;
  double size = 1.0;   // expected survivors
  double index = 1.0;  // survival index, fraction of the initial cohort alive
};

enum class PropagationMode { Deterministic, Binomial };

// (phi1, phi2, phi3)(x). Throws DomainError outside [18, 100].
std::array<double, 3> basis_phi(double age);

// Same as basis_phi but clamps ages above 100 to 100. Ages below 18 still throw.
std::array<double, 3> basis_phi_clamped(double age);

double logit(double p);
double inv_logit(double z);

// p_x(v) = exp(sum v^i phi^i(x)) / (1 + exp(...)). Ages above 100 are clamped.
double survival_prob(const RiskFactors& v, double age);

CohortState propagate_cohort(const CohortState& c, double p, PropagationMode mode,
                             std::mt19937_64& rng);

// S_0 = 1, S_t = S_{t-1} p(v_t, start_age + t - 1); v_path holds v_1..v_T.
std::vector<double> survival_index_path(std::span<const RiskFactors> v_path, int start_age = 65);

struct AgeObservation {
  int age = 0;
  double exposure = 0.0;
  double deaths = 0.0;
};

struct FitOptions {
  // Stopping rule on the gradient norm divided by total exposure.
  double gradient_tol = 1e-8;
  int max_iters = 200;
};

// Maximizes the binomial log-likelihood of one year of data.
// Throws FitDegenerateError when the factors are not identified.
RiskFactors fit_risk_factors(std::span<const AgeObservation> data, const FitOptions& opts = {});

// Binomial log-likelihood sum_x (E-D) log p_x + D log(1 - p_x).
double log_likelihood(std::span<const AgeObservation> data, const RiskFactors& v);

// Reads a CSV with header `age,exposure,deaths`.
std::vector<AgeObservation> read_mortality_csv(const std::filesystem::path& path);

}  // namespace alm::mortality
