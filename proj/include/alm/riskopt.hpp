#pragma once

// Entropic risk measure and optimal diversification over basis strategies.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace alm::riskopt {

// N x I terminal wealth, W(k, i) = terminal wealth of strategy i in scenario k.
// Stored row-major (one row per scenario).
class TerminalWealthMatrix {
 public:
  TerminalWealthMatrix() = default;
  TerminalWealthMatrix(std::size_t scenarios, std::size_t strategies);
  TerminalWealthMatrix(std::size_t scenarios, std::size_t strategies, std::vector<double> row_major);

  std::size_t scenarios() const { return n_; }
  std::size_t strategies() const { return i_; }

  double operator()(std::size_t k, std::size_t i) const { return data_[k * i_ + i]; }
  double& operator()(std::size_t k, std::size_t i) { return data_[k * i_ + i]; }
  std::span<const double> row(std::size_t k) const { return {data_.data() + k * i_, i_}; }

  std::vector<double> column(std::size_t i) const;
  // First `count` columns.
  TerminalWealthMatrix leading_columns(std::size_t count) const;
  // Appends one column.
  TerminalWealthMatrix with_column(std::span<const double> col) const;
  // W alpha.
  std::vector<double> mix(std::span<const double> alpha) const;

  // Throws DomainError on empty shape or non-finite entries.
  void validate() const;

 private:
  std::size_t n_ = 0;
  std::size_t i_ = 0;
  std::vector<double> data_;
};

// (1/gamma) log( (1/N) sum_k exp(-gamma x_k) ), evaluated with a shifted
// log-sum-exp so any finite sample gives a finite value.
double entropic_risk(std::span<const double> samples, double gamma);

struct ObjectiveValue {
  double value = 0.0;
  std::vector<double> gradient;
};

// rho(W alpha) and its gradient -W^T q, q_k proportional to exp(-gamma (W alpha)_k).
ObjectiveValue diversified_objective(std::span<const double> alpha, const TerminalWealthMatrix& w,
                                     double gamma);

// Frank-Wolfe gap sum_i alpha_i (g_i - min_j g_j). It is nonnegative, zero
// exactly at a simplex KKT point, and bounds the suboptimality of a convex
// objective from above.
double simplex_gap(std::span<const double> alpha, std::span<const double> gradient);

// Largest violation of the simplex KKT conditions with multiplier min_j g_j:
// max over components with alpha_i > active_threshold of g_i - min_j g_j.
double kkt_violation(std::span<const double> alpha, std::span<const double> gradient,
                     double active_threshold);

struct OptimizerOptions {
  double tol = 1e-8;             // on simplex_gap
  std::size_t max_iters = 100000;  // objective evaluations, both phases
  std::size_t eg_iters = 300;    // exponentiated-gradient iterations before the Newton phase
  double initial_step = 1.0;     // exponentiated-gradient step, adapted by backtracking
};

struct OptimizeResult {
  std::vector<double> alpha;
  double value = 0.0;
  double residual = 0.0;        // simplex_gap at alpha
  std::size_t iterations = 0;    // EG iterations plus Newton-phase evaluations
};

// Exponentiated-gradient (entropic mirror descent) with backtracking on the
// relative-smoothness condition, followed when the certificate is still above
// `tol` by a log-barrier Newton phase that follows the central path down to
// simplex_gap <= tol. Starts from the uniform mixture unless `start` is given
// (strictly positive entries, any scale).
// Throws ConvergenceError carrying the best iterate when max_iters is reached.
OptimizeResult optimize_weights(const TerminalWealthMatrix& w, double gamma,
                                const OptimizerOptions& opts = {},
                                std::span<const double> start = {});

struct RankedStrategy {
  int id = 0;
  double rho = 0.0;
};

// Per-column entropic risk, ascending, ties broken by id. `ids` defaults to 1..I.
std::vector<RankedStrategy> rank_strategies(const TerminalWealthMatrix& w, double gamma,
                                            std::size_t k, std::span<const int> ids = {});

}  // namespace alm::riskopt
