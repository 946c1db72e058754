#include "alm/economy.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "alm/error.hpp"

namespace alm::economy {

namespace {

bool finite(double x) { return std::isfinite(x); }

// Uniform on the open interval (0, 1) from the top 53 bits.
double open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

Shock correlate(const Matrix8& chol, const Shock& z) {
  Shock x{};
  for (std::size_t i = 0; i < kStateDim; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += chol[i][j] * z[j];
    x[i] = acc;
  }
  return x;
}

}  // namespace

void ModelCoefficients::validate() const {
  const auto& d = a;
  for (double x : {d.a11, d.a33, d.a34, d.a45, d.a46, d.a55, d.a66, d.a77, delta_t}) {
    if (!finite(x)) throw ConfigError("model coefficients: non-finite drift coefficient");
  }
  if (!(delta_t > 0.0)) throw ConfigError("model coefficients: delta_t must be positive");
  for (double x : b) {
    if (!finite(x)) throw ConfigError("model coefficients: non-finite intercept");
  }
  for (std::size_t i = 0; i < kStateDim; ++i) {
    for (std::size_t j = 0; j < kStateDim; ++j) {
      if (!finite(shock_cov[i][j])) throw ConfigError("shock_cov: non-finite entry");
      const double scale = std::max({1.0, std::abs(shock_cov[i][j]), std::abs(shock_cov[j][i])});
      if (std::abs(shock_cov[i][j] - shock_cov[j][i]) > 1e-12 * scale) {
        throw FactorizationError("shock_cov: matrix is not symmetric");
      }
    }
  }
  cholesky_psd(shock_cov);
}

Scenario Scenario::without_claims() const {
  Scenario s = *this;
  std::fill(s.claims.begin(), s.claims.end(), 0.0);
  return s;
}

EconState step_state(const EconState& s, const ModelCoefficients& c, const Shock& e) {
  const auto& a = c.a;
  const auto& b = c.b;
  EconState n = s;
  n.v1 += a.a11 * s.v1 + b[0] + e[0];
  n.v2 += b[1] + e[1];
  n.v3 += a.a33 * s.v3 + a.a34 * s.g + b[2] + e[2];
  n.g += a.a45 * s.sT + a.a46 * s.sC + b[3] + e[3];
  n.sT += a.a55 * s.sT + b[4] + e[4];
  n.sC += a.a66 * s.sC + b[5] + e[5];
  n.y1 += a.a77 * s.y1 + b[6] + e[6];
  n.sE += b[7] + e[7];
  return n;
}

YieldCurvePoint yields_from_state(const EconState& s) {
  const double log_y2 = s.y1 + s.sT;
  return {std::exp(s.y1), std::exp(log_y2), std::exp(log_y2 + std::exp(s.sC))};
}

void encode_yields(const YieldCurvePoint& y, EconState& s) {
  s.y1 = std::log(y.Y1);
  s.sT = std::log(y.Y2) - s.y1;
  s.sC = std::log(std::log(y.Y3) - std::log(y.Y2));
}

Returns asset_returns(const YieldCurvePoint& prev, const YieldCurvePoint& curr, double prev_sE,
                      double curr_sE, double delta_t, const Durations& dur) {
  // The corporate bond earns the start-of-period long government yield.
  return {
      std::exp(prev.Y1 * delta_t - dur.short_gov * (curr.Y1 - prev.Y1)),
      std::exp(prev.Y2 * delta_t - dur.long_gov * (curr.Y2 - prev.Y2)),
      std::exp(prev.Y2 * delta_t - dur.corporate * (curr.Y3 - prev.Y3)),
      std::exp(curr_sE - prev_sE),
  };
}

Matrix8 cholesky_psd(const Matrix8& cov) {
  double scale = 0.0;
  for (std::size_t i = 0; i < kStateDim; ++i) scale = std::max(scale, std::abs(cov[i][i]));
  const double tol = 1e-12 * std::max(scale, 1e-300);

  Matrix8 l{};
  for (std::size_t j = 0; j < kStateDim; ++j) {
    double diag = cov[j][j];
    for (std::size_t k = 0; k < j; ++k) diag -= l[j][k] * l[j][k];
    if (diag < -tol) {
      throw FactorizationError("cholesky: matrix is not positive semidefinite (pivot " +
                               std::to_string(diag) + " in column " + std::to_string(j) + ")");
    }
    if (diag <= tol) {
      // Zero pivot: the remaining column must vanish as well.
      for (std::size_t i = j + 1; i < kStateDim; ++i) {
        double off = cov[i][j];
        for (std::size_t k = 0; k < j; ++k) off -= l[i][k] * l[j][k];
        if (std::abs(off) > 1e-8 * std::max(scale, 1e-300)) {
          throw FactorizationError("cholesky: matrix is not positive semidefinite");
        }
      }
      continue;
    }
    const double pivot = std::sqrt(diag);
    l[j][j] = pivot;
    for (std::size_t i = j + 1; i < kStateDim; ++i) {
      double off = cov[i][j];
      for (std::size_t k = 0; k < j; ++k) off -= l[i][k] * l[j][k];
      l[i][j] = off / pivot;
    }
  }
  return l;
}

double normal_quantile(double u) {
  static const boost::math::normal_distribution<double> std_normal;
  return boost::math::quantile(std_normal, u);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

std::vector<Shock> lhs_standard_normals(std::size_t n, std::mt19937_64& rng) {
  if (n == 0) throw DomainError("lhs_normals: sample count must be positive");
  std::vector<Shock> z(n);
  std::vector<std::size_t> strata(n);
  const double width = 1.0 / static_cast<double>(n);
  for (std::size_t d = 0; d < kStateDim; ++d) {
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    std::shuffle(strata.begin(), strata.end(), rng);
    for (std::size_t k = 0; k < n; ++k) {
      const double u = (static_cast<double>(strata[k]) + open_uniform(rng)) * width;
      z[k][d] = normal_quantile(u);
    }
  }
  return z;
}

std::vector<Shock> lhs_normals(std::size_t n, const Matrix8& cov, std::mt19937_64& rng) {
  const auto chol = cholesky_psd(cov);
  auto z = lhs_standard_normals(n, rng);
  for (auto& row : z) row = correlate(chol, row);
  return z;
}

std::vector<Shock> iid_normals(std::size_t n, const Matrix8& cov, std::mt19937_64& rng) {
  if (n == 0) throw DomainError("iid_normals: sample count must be positive");
  const auto chol = cholesky_psd(cov);
  std::vector<Shock> z(n);
  for (auto& row : z) {
    for (auto& x : row) x = normal_quantile(open_uniform(rng));
    row = correlate(chol, row);
  }
  return z;
}

std::vector<Scenario> generate_scenarios(const EconState& init, const ModelCoefficients& coeffs,
                                         const SimulationSettings& sim, const Durations& dur) {
  coeffs.validate();
  if (sim.n == 0) throw DomainError("generate_scenarios: n must be positive");
  const std::size_t n = sim.n;
  const std::size_t horizon = sim.horizon;

  std::vector<Scenario> out(n);
  std::vector<EconState> state(n, init);
  std::vector<std::vector<mortality::RiskFactors>> v_paths(n);
  const auto y0 = yields_from_state(init);
  std::vector<YieldCurvePoint> curve(n, y0);

  for (auto& s : out) {
    s.returns.reserve(horizon);
    s.sT.assign(1, init.sT);
    s.sC.assign(1, init.sC);
    s.y1.assign(1, init.y1);
  }
  for (auto& p : v_paths) p.reserve(horizon);

  std::mt19937_64 rng(sim.seed);
  for (std::size_t t = 1; t <= horizon; ++t) {
    const auto shocks = sim.sampling == Sampling::LatinHypercube
                            ? lhs_normals(n, coeffs.shock_cov, rng)
                            : iid_normals(n, coeffs.shock_cov, rng);
    for (std::size_t k = 0; k < n; ++k) {
      const EconState next = step_state(state[k], coeffs, shocks[k]);
      const YieldCurvePoint y = yields_from_state(next);
      auto& scn = out[k];
      scn.returns.push_back(asset_returns(curve[k], y, state[k].sE, next.sE, coeffs.delta_t, dur));
      scn.sT.push_back(next.sT);
      scn.sC.push_back(next.sC);
      scn.y1.push_back(next.y1);
      v_paths[k].push_back(next.risk_factors());
      state[k] = next;
      curve[k] = y;
    }
  }

  for (std::size_t k = 0; k < n; ++k) {
    out[k].survival = mortality::survival_index_path(v_paths[k], sim.cohort_age);
    out[k].claims = out[k].survival;
  }
  return out;
}

}  // namespace alm::economy
