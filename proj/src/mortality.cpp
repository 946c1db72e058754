#include "alm/mortality.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "alm/error.hpp"
#include "alm/csv.hpp"

namespace alm::mortality {

namespace {

// Largest double below one; keeps log(1 - p) finite.
constexpr double kProbCeil = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
constexpr double kProbFloor = std::numeric_limits<double>::min();

double linear_predictor(const RiskFactors& v, const std::array<double, 3>& phi) {
  return v.v1 * phi[0] + v.v2 * phi[1] + v.v3 * phi[2];
}

}  // namespace

std::array<double, 3> basis_phi(double age) {
  if (!(age >= kMinAge && age <= kMaxAge)) {
    throw DomainError("basis_phi: age " + std::to_string(age) + " outside [18, 100]");
  }
  if (age <= 50.0) {
    const double s = (age - 18.0) / 32.0;
    return {1.0 - s, s, 0.0};
  }
  return {0.0, 2.0 - age / 50.0, age / 50.0 - 1.0};
}

std::array<double, 3> basis_phi_clamped(double age) {
  return basis_phi(std::min(age, static_cast<double>(kMaxAge)));
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

double inv_logit(double z) {
  double p;
  if (z >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    p = e / (1.0 + e);
  }
  return std::clamp(p, kProbFloor, kProbCeil);
}

double survival_prob(const RiskFactors& v, double age) {
  return inv_logit(linear_predictor(v, basis_phi_clamped(age)));
}

CohortState propagate_cohort(const CohortState& c, double p, PropagationMode mode,
                             std::mt19937_64& rng) {
  CohortState next{c.age + 1, 0.0, 0.0};
  if (mode == PropagationMode::Deterministic) {
    next.size = c.size * p;
    next.index = c.index * p;
    return next;
  }
  const auto trials = static_cast<long long>(std::llround(c.size));
  if (trials <= 0 || c.size <= 0.0) {
    return next;
  }
  std::binomial_distribution<long long> draw(trials, p);
  next.size = static_cast<double>(draw(rng));
  next.index = c.index * (next.size / c.size);
  return next;
}

std::vector<double> survival_index_path(std::span<const RiskFactors> v_path, int start_age) {
  std::vector<double> s;
  s.reserve(v_path.size() + 1);
  s.push_back(1.0);
  for (std::size_t t = 0; t < v_path.size(); ++t) {
    s.push_back(s.back() * survival_prob(v_path[t], start_age + static_cast<double>(t)));
  }
  return s;
}

double log_likelihood(std::span<const AgeObservation> data, const RiskFactors& v) {
  double ll = 0.0;
  for (const auto& obs : data) {
    const double p = survival_prob(v, obs.age);
    const double survivors = obs.exposure - obs.deaths;
    if (survivors > 0.0) ll += survivors * std::log(p);
    if (obs.deaths > 0.0) ll += obs.deaths * std::log1p(-p);
  }
  return ll;
}

RiskFactors fit_risk_factors(std::span<const AgeObservation> data, const FitOptions& opts) {
  double total_exposure = 0.0;
  double total_deaths = 0.0;
  Eigen::Matrix3d design = Eigen::Matrix3d::Zero();
  for (const auto& obs : data) {
    basis_phi(obs.age);  // domain check
    if (obs.exposure < 0.0 || obs.deaths < 0.0 || obs.deaths > obs.exposure) {
      throw ConfigError("fit_risk_factors: need 0 <= deaths <= exposure at age " +
                        std::to_string(obs.age));
    }
    if (obs.exposure == 0.0) continue;
    const auto phi = basis_phi(obs.age);
    const Eigen::Vector3d f(phi[0], phi[1], phi[2]);
    design += f * f.transpose();
    total_exposure += obs.exposure;
    total_deaths += obs.deaths;
  }
  if (total_exposure <= 0.0) {
    throw FitDegenerateError("fit_risk_factors: no exposure");
  }
  if (total_deaths == 0.0 || total_deaths == total_exposure) {
    throw FitDegenerateError("fit_risk_factors: all survivors or all deaths, MLE is at infinity");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(design);
  if (eig.eigenvalues().minCoeff() <= 1e-10 * eig.eigenvalues().maxCoeff()) {
    throw FitDegenerateError("fit_risk_factors: ages do not identify all three risk factors");
  }

  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  auto to_factors = [](const Eigen::Vector3d& x) { return RiskFactors{x[0], x[1], x[2]}; };

  double ll = log_likelihood(data, to_factors(v));
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    Eigen::Vector3d grad = Eigen::Vector3d::Zero();
    Eigen::Matrix3d info = Eigen::Matrix3d::Zero();  // negative Hessian
    for (const auto& obs : data) {
      if (obs.exposure == 0.0) continue;
      const auto phi = basis_phi(obs.age);
      const Eigen::Vector3d f(phi[0], phi[1], phi[2]);
      const double p = inv_logit(v.dot(f));
      grad += f * ((obs.exposure - obs.deaths) - obs.exposure * p);
      info += f * f.transpose() * (obs.exposure * p * (1.0 - p));
    }
    if (grad.norm() / total_exposure <= opts.gradient_tol) {
      return to_factors(v);
    }

    Eigen::Vector3d step;
    Eigen::LLT<Eigen::Matrix3d> llt(info);
    if (llt.info() == Eigen::Success && info.diagonal().minCoeff() > 0.0) {
      step = llt.solve(grad);
    } else {
      step = grad / total_exposure;  // gradient-ascent fallback
    }

    double scale = 1.0;
    bool improved = false;
    for (int k = 0; k < 60; ++k) {
      const Eigen::Vector3d trial = v + scale * step;
      const double trial_ll = log_likelihood(data, to_factors(trial));
      if (std::isfinite(trial_ll) && trial_ll >= ll) {
        v = trial;
        ll = trial_ll;
        improved = true;
        break;
      }
      scale *= 0.5;
    }
    if (!improved) {
      // No ascent direction left at machine precision.
      return to_factors(v);
    }
    if (v.cwiseAbs().maxCoeff() > 700.0) {
      throw FitDegenerateError("fit_risk_factors: risk factors diverge, data separable");
    }
  }
  throw FitDegenerateError("fit_risk_factors: Newton iteration did not converge");
}

std::vector<AgeObservation> read_mortality_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  const auto age_col = table.column("age");
  const auto exp_col = table.column("exposure");
  const auto death_col = table.column("deaths");
  std::vector<AgeObservation> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    AgeObservation obs;
    obs.age = static_cast<int>(csv::parse_double(row.at(age_col)));
    obs.exposure = csv::parse_double(row.at(exp_col));
    obs.deaths = csv::parse_double(row.at(death_col));
    out.push_back(obs);
  }
  return out;
}

}  // namespace alm::mortality
