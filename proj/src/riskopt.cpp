#include "alm/riskopt.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "alm/error.hpp"

namespace alm::riskopt {

namespace {

void require_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw DomainError("entropic risk: gamma must be positive and finite");
  }
}

double log_sum_exp(std::span<const double> z) {
  const double top = *std::max_element(z.begin(), z.end());
  double acc = 0.0;
  for (double x : z) acc += std::exp(x - top);
  return top + std::log(acc);
}

std::vector<double> softmax(std::span<const double> theta) {
  const double lse = log_sum_exp(theta);
  std::vector<double> p(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) p[i] = std::exp(theta[i] - lse);
  return p;
}

// sum_i p_i (log p_i - log q_i) with p = softmax(a), q = softmax(b).
double kl_divergence(std::span<const double> a, std::span<const double> b) {
  const double lse_a = log_sum_exp(a);
  const double lse_b = log_sum_exp(b);
  double kl = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double log_p = a[i] - lse_a;
    const double p = std::exp(log_p);
    if (p > 0.0) kl += p * (log_p - (b[i] - lse_b));
  }
  return std::max(kl, 0.0);
}

}  // namespace

TerminalWealthMatrix::TerminalWealthMatrix(std::size_t scenarios, std::size_t strategies)
    : n_(scenarios), i_(strategies), data_(scenarios * strategies, 0.0) {}

TerminalWealthMatrix::TerminalWealthMatrix(std::size_t scenarios, std::size_t strategies,
                                           std::vector<double> row_major)
    : n_(scenarios), i_(strategies), data_(std::move(row_major)) {
  if (data_.size() != n_ * i_) throw DomainError("TerminalWealthMatrix: data size mismatch");
}

std::vector<double> TerminalWealthMatrix::column(std::size_t i) const {
  std::vector<double> col(n_);
  for (std::size_t k = 0; k < n_; ++k) col[k] = (*this)(k, i);
  return col;
}

TerminalWealthMatrix TerminalWealthMatrix::leading_columns(std::size_t count) const {
  if (count > i_) throw DomainError("TerminalWealthMatrix: too many columns requested");
  TerminalWealthMatrix out(n_, count);
  for (std::size_t k = 0; k < n_; ++k) {
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(k * i_), count,
                out.data_.begin() + static_cast<std::ptrdiff_t>(k * count));
  }
  return out;
}

TerminalWealthMatrix TerminalWealthMatrix::with_column(std::span<const double> col) const {
  if (col.size() != n_) throw DomainError("TerminalWealthMatrix: column length mismatch");
  TerminalWealthMatrix out(n_, i_ + 1);
  for (std::size_t k = 0; k < n_; ++k) {
    for (std::size_t i = 0; i < i_; ++i) out(k, i) = (*this)(k, i);
    out(k, i_) = col[k];
  }
  return out;
}

std::vector<double> TerminalWealthMatrix::mix(std::span<const double> alpha) const {
  if (alpha.size() != i_) throw DomainError("TerminalWealthMatrix: weight dimension mismatch");
  std::vector<double> out(n_);
  for (std::size_t k = 0; k < n_; ++k) {
    const double* r = data_.data() + k * i_;
    double acc = 0.0;
    for (std::size_t i = 0; i < i_; ++i) acc += r[i] * alpha[i];
    out[k] = acc;
  }
  return out;
}

void TerminalWealthMatrix::validate() const {
  if (n_ == 0 || i_ == 0) throw DomainError("TerminalWealthMatrix: empty matrix");
  for (double x : data_) {
    if (!std::isfinite(x)) throw DomainError("TerminalWealthMatrix: non-finite entry");
  }
}

double entropic_risk(std::span<const double> samples, double gamma) {
  require_gamma(gamma);
  if (samples.empty()) throw DomainError("entropic_risk: empty sample");
  double top = -std::numeric_limits<double>::infinity();
  for (double x : samples) top = std::max(top, -gamma * x);
  double acc = 0.0;
  for (double x : samples) acc += std::exp(-gamma * x - top);
  return (top + std::log(acc / static_cast<double>(samples.size()))) / gamma;
}

ObjectiveValue diversified_objective(std::span<const double> alpha, const TerminalWealthMatrix& w,
                                     double gamma) {
  require_gamma(gamma);
  if (alpha.size() != w.strategies()) {
    throw DomainError("diversified_objective: alpha has " + std::to_string(alpha.size()) +
                      " entries, W has " + std::to_string(w.strategies()) + " columns");
  }
  const std::size_t n = w.scenarios();
  if (n == 0) throw DomainError("diversified_objective: no scenarios");

  std::vector<double> z = w.mix(alpha);
  double top = -std::numeric_limits<double>::infinity();
  for (auto& x : z) {
    x *= -gamma;
    top = std::max(top, x);
  }
  double total = 0.0;
  for (auto& x : z) {
    x = std::exp(x - top);
    total += x;
  }

  ObjectiveValue out;
  out.value = (top + std::log(total / static_cast<double>(n))) / gamma;
  out.gradient.assign(w.strategies(), 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double q = z[k] / total;
    const auto row = w.row(k);
    for (std::size_t i = 0; i < row.size(); ++i) out.gradient[i] -= q * row[i];
  }
  return out;
}

double simplex_gap(std::span<const double> alpha, std::span<const double> gradient) {
  const double g_min = *std::min_element(gradient.begin(), gradient.end());
  double gap = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) gap += alpha[i] * (gradient[i] - g_min);
  return std::max(gap, 0.0);
}

double kkt_violation(std::span<const double> alpha, std::span<const double> gradient,
                     double active_threshold) {
  const double g_min = *std::min_element(gradient.begin(), gradient.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] > active_threshold) worst = std::max(worst, gradient[i] - g_min);
  }
  return worst;
}

namespace {

// gamma (W^T diag(q) W - g g^T) with g = W^T q, q the exponential tilt at alpha.
Eigen::MatrixXd objective_hessian(std::span<const double> alpha, const TerminalWealthMatrix& w,
                                  double gamma) {
  const std::size_t n = w.scenarios();
  const std::size_t dim = w.strategies();
  std::vector<double> z = w.mix(alpha);
  double top = -std::numeric_limits<double>::infinity();
  for (auto& x : z) {
    x *= -gamma;
    top = std::max(top, x);
  }
  double total = 0.0;
  for (auto& x : z) {
    x = std::exp(x - top);
    total += x;
  }
  Eigen::MatrixXd scaled(n, dim);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < n; ++k) {
    const double q = z[k] / total;
    const double root = std::sqrt(q);
    const auto row = w.row(k);
    for (std::size_t i = 0; i < dim; ++i) {
      scaled(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = root * row[i];
      mean[static_cast<Eigen::Index>(i)] += q * row[i];
    }
  }
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  h.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
  h.selfadjointView<Eigen::Lower>().rankUpdate(mean, -1.0);
  h.triangularView<Eigen::StrictlyUpper>() = h.transpose();
  return gamma * h;
}

struct BarrierPoint {
  std::vector<double> alpha;
  ObjectiveValue obj;
  double barrier = 0.0;  // f - mu sum log alpha
};

BarrierPoint barrier_point(std::vector<double> alpha, const TerminalWealthMatrix& w, double gamma,
                           double mu) {
  BarrierPoint p;
  p.obj = diversified_objective(alpha, w, gamma);
  double logs = 0.0;
  for (double a : alpha) logs += std::log(a);
  p.barrier = p.obj.value - mu * logs;
  p.alpha = std::move(alpha);
  return p;
}

// Log-barrier Newton method on the simplex, in affine-scaled coordinates
// d = diag(alpha) u. Follows the central path until dim * mu <= tol / 10;
// on the path the simplex gap is at most dim * mu.
std::vector<double> barrier_newton(std::vector<double> alpha, const TerminalWealthMatrix& w,
                                   double gamma, double tol, std::size_t& evaluations,
                                   std::size_t max_evaluations) {
  const std::size_t dim = alpha.size();
  const auto n_dim = static_cast<Eigen::Index>(dim);
  const double gap = simplex_gap(alpha, diversified_objective(alpha, w, gamma).gradient);
  double mu = std::max(gap, tol) / static_cast<double>(dim);
  const double mu_final = tol / (10.0 * static_cast<double>(dim));

  auto point = barrier_point(std::move(alpha), w, gamma, mu);
  while (evaluations < max_evaluations) {
    for (int newton = 0; newton < 100 && evaluations < max_evaluations; ++newton) {
      const Eigen::MatrixXd hess = objective_hessian(point.alpha, w, gamma);
      ++evaluations;
      // Shifting g by a constant only moves the multiplier of a'u = 0; using
      // the alpha-weighted mean avoids cancellation once g is nearly flat.
      double g_mean = 0.0;
      for (std::size_t i = 0; i < dim; ++i) g_mean += point.alpha[i] * point.obj.gradient[i];
      Eigen::VectorXd a(n_dim), r(n_dim);
      for (Eigen::Index i = 0; i < n_dim; ++i) {
        const auto k = static_cast<std::size_t>(i);
        a[i] = point.alpha[k];
        r[i] = a[i] * (point.obj.gradient[k] - g_mean) - mu;  // scaled barrier gradient
      }
      Eigen::MatrixXd m = a.asDiagonal() * hess * a.asDiagonal();
      m.diagonal().array() += mu;
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
      // Minimize 0.5 u'Mu + r'u subject to a'u = 0.
      const Eigen::VectorXd mr = ldlt.solve(r);
      const Eigen::VectorXd ma = ldlt.solve(a);
      const double nu = -a.dot(mr) / a.dot(ma);
      const Eigen::VectorXd u = -(mr + nu * ma);
      const double decrement = -r.dot(u);
      // decrement / mu is the squared Newton decrement of the barrier scaled
      // by 1/mu; below 0.1 the full step is safe and the barrier value is too
      // flat to resolve an Armijo test anyway.
      const double centrality = decrement / mu;
      if (!(decrement > 0.0) || centrality < 1e-10) break;

      double step = 1.0;
      for (Eigen::Index i = 0; i < n_dim; ++i) {
        if (u[i] < 0.0) step = std::min(step, -0.99 / u[i]);
      }
      const bool full_step = centrality < 0.1;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        std::vector<double> trial(dim);
        double sum = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
          trial[i] = point.alpha[i] * (1.0 + step * u[static_cast<Eigen::Index>(i)]);
          sum += trial[i];
        }
        for (auto& x : trial) x /= sum;
        auto next = barrier_point(std::move(trial), w, gamma, mu);
        ++evaluations;
        if (std::isfinite(next.barrier) &&
            (full_step || next.barrier <= point.barrier - 0.25 * step * decrement)) {
          point = std::move(next);
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    if (mu <= mu_final) break;
    mu = std::max(mu * 0.1, mu_final);
    point = barrier_point(std::move(point.alpha), w, gamma, mu);
  }
  return point.alpha;
}

}  // namespace

OptimizeResult optimize_weights(const TerminalWealthMatrix& w, double gamma,
                                const OptimizerOptions& opts, std::span<const double> start) {
  w.validate();
  require_gamma(gamma);
  const std::size_t dim = w.strategies();

  // Iterate in log-weights so no component underflows to an absorbing zero.
  std::vector<double> theta(dim, 0.0);
  if (!start.empty()) {
    if (start.size() != dim) throw DomainError("optimize_weights: start has wrong dimension");
    for (std::size_t i = 0; i < dim; ++i) {
      if (!(start[i] > 0.0)) throw DomainError("optimize_weights: start must be strictly positive");
      theta[i] = std::log(start[i]);
    }
  }

  OptimizeResult res;
  res.alpha = softmax(theta);
  auto current = diversified_objective(res.alpha, w, gamma);
  res.value = current.value;
  res.residual = simplex_gap(res.alpha, current.gradient);

  // Phase 1: exponentiated gradient.
  double step = opts.initial_step;
  std::vector<double> trial_theta(dim);
  std::size_t iter = 0;
  const std::size_t eg_budget = std::min(opts.max_iters, opts.eg_iters);
  for (; iter < eg_budget && res.residual > opts.tol; ++iter) {
    bool accepted = false;
    while (step > 1e-300) {
      for (std::size_t i = 0; i < dim; ++i) trial_theta[i] = theta[i] - step * current.gradient[i];
      const double shift = *std::max_element(trial_theta.begin(), trial_theta.end());
      for (auto& x : trial_theta) x -= shift;
      auto trial_alpha = softmax(trial_theta);
      auto trial = diversified_objective(trial_alpha, w, gamma);

      double linear = 0.0;
      for (std::size_t i = 0; i < dim; ++i) linear += current.gradient[i] * (trial_alpha[i] - res.alpha[i]);
      const double bound = current.value + linear + kl_divergence(trial_theta, theta) / step;
      const double slack = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(current.value);
      if (std::isfinite(trial.value) && trial.value <= bound + slack && trial.value <= current.value + slack) {
        theta.swap(trial_theta);
        res.alpha = std::move(trial_alpha);
        current = std::move(trial);
        res.value = current.value;
        res.residual = simplex_gap(res.alpha, current.gradient);
        step = std::min(step * 2.0, 1e12);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  res.iterations = iter;
  if (res.residual <= opts.tol) return res;

  // Phase 2: interior-point Newton from a slightly interior copy of the EG iterate.
  if (iter < opts.max_iters) {
    std::vector<double> alpha(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      alpha[i] = 0.999 * res.alpha[i] + 0.001 / static_cast<double>(dim);
    }
    std::size_t evaluations = iter;
    alpha = barrier_newton(std::move(alpha), w, gamma, opts.tol, evaluations, opts.max_iters);
    auto polished = diversified_objective(alpha, w, gamma);
    const double gap = simplex_gap(alpha, polished.gradient);
    if (gap < res.residual) {
      res.alpha = std::move(alpha);
      res.value = polished.value;
      res.residual = gap;
    }
    res.iterations = evaluations;
  }
  if (res.residual <= opts.tol) return res;
  throw ConvergenceError("optimize_weights: no convergence in " + std::to_string(opts.max_iters) +
                             " iterations, residual " + std::to_string(res.residual),
                         res.alpha, res.value, res.residual);
}

std::vector<RankedStrategy> rank_strategies(const TerminalWealthMatrix& w, double gamma,
                                            std::size_t k, std::span<const int> ids) {
  w.validate();
  if (!ids.empty() && ids.size() != w.strategies()) {
    throw DomainError("rank_strategies: one id per column required");
  }
  if (k > w.strategies()) throw DomainError("rank_strategies: k exceeds the number of strategies");
  std::vector<RankedStrategy> all(w.strategies());
  for (std::size_t i = 0; i < w.strategies(); ++i) {
    all[i].id = ids.empty() ? static_cast<int>(i) + 1 : ids[i];
    all[i].rho = entropic_risk(w.column(i), gamma);
  }
  std::sort(all.begin(), all.end(), [](const RankedStrategy& a, const RankedStrategy& b) {
    return a.rho != b.rho ? a.rho < b.rho : a.id < b.id;
  });
  all.resize(k);
  return all;
}

}  // namespace alm::riskopt
