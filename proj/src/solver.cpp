#include "spint/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "spint/error.hpp"
#include "spint/kernels.hpp"

namespace spint {

void validate(const SolverConfig& c, double max_count) {
  if (!(c.gamma > 0.0 && c.gamma < 0.5)) throw InvalidArgument("gamma must lie in (0, 1/2)");
  if (c.count_ceiling < 0.0 || !std::isfinite(c.count_ceiling))
    throw InvalidArgument("count ceiling Y must be nonnegative");
  if (c.count_ceiling > 0.0 && c.count_ceiling < max_count) {
    std::ostringstream os;
    os << "count ceiling Y=" << c.count_ceiling << " is below the largest count " << max_count;
    throw InvalidArgument(os.str());
  }
  if (!(c.eps_outer > 0.0) || !(c.eps_inner > 0.0))
    throw InvalidArgument("solver tolerances must be positive");
  if (c.max_outer == 0 || c.max_inner == 0)
    throw InvalidArgument("solver iteration caps must be positive");
  if (c.weight_floor < 0.0) throw InvalidArgument("weight floor must be nonnegative");
}

double resolve_ceiling(const SolverConfig& c, double max_count) {
  if (c.count_ceiling > 0.0) return c.count_ceiling;
  return std::max(1.0, 2.0 * max_count);
}

namespace {

double penalty(std::span<const double> theta, std::span<const double> w) {
  double s = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) s += w[k] * std::fabs(theta[k]);
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

// exp of the linear predictor with the overflow guard; returns V(theta).
struct PoissonState {
  std::vector<double> eta;
  std::vector<double> mean;
  bool clamped = false;

  explicit PoissonState(std::size_t n) : eta(n), mean(n) {}

  double evaluate(std::span<const double> theta, std::span<const double> counts,
                  const DesignMatrix& design, double log_fact_sum) {
    design.predictor(theta, eta);
    for (std::size_t i = 0; i < eta.size(); ++i) mean[i] = guarded_exp(eta[i], &clamped);
    return (kernels::poisson_deviance_terms(mean, counts, eta) + log_fact_sum) /
           static_cast<double>(eta.size());
  }
};

double log_factorial_sum(std::span<const double> counts) {
  double s = 0.0;
  for (double y : counts) s += std::lgamma(y + 1.0);
  return s;
}

void check_counts(std::span<const double> counts) {
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (!(counts[i] >= 0.0) || !std::isfinite(counts[i])) {
      std::ostringstream os;
      os << "count " << i << " is negative or not finite";
      throw InvalidArgument(os.str());
    }
}

}  // namespace

double penalized_objective(std::span<const double> theta, std::span<const double> counts,
                           const DesignMatrix& design, double rho, std::span<const double> w) {
  return neg_log_likelihood(theta, counts, design) + rho * penalty(theta, w);
}

std::vector<double> penalty_weights(const DesignMatrix& design, const SolverConfig& config,
                                    WeightsMode mode, std::size_t* floored) {
  if (floored) *floored = 0;
  if (mode == WeightsMode::zero) return std::vector<double>(design.components(), 0.0);
  std::vector<double> w = regularization_weights(design);
  for (double& x : w)
    if (x < config.weight_floor) {
      x = config.weight_floor;
      if (floored) ++*floored;
    }
  return w;
}

double soft_threshold(double z, double t) noexcept {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double weighted_lasso_objective(const DesignMatrix& design, std::span<const double> target,
                                double curvature, double rho, std::span<const double> w,
                                std::span<const double> theta) {
  const std::size_t n = design.samples();
  std::vector<double> r(n);
  design.predictor(theta, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = target[i] - r[i];
  return curvature / (2.0 * n) * kernels::sum_squares(r) + rho * penalty(theta, w);
}

namespace {

// Gram form of the weighted lasso: minimize 1/2 t^T G t - b^T t + sum lambda_k |t_k|
// with G = Phi Phi^T, b = Phi q, lambda_k = rho w_k n / c.
struct GramProblem {
  std::size_t R = 0;
  std::vector<double> G;  // row-major R x R

  explicit GramProblem(const DesignMatrix& design) : R(design.components()), G(R * R) {
    for (std::size_t j = 0; j < R; ++j)
      for (std::size_t k = j; k < R; ++k) {
        const double v = kernels::dot(design.column(j), design.column(k));
        G[j * R + k] = v;
        G[k * R + j] = v;
      }
  }
  double at(std::size_t j, std::size_t k) const { return G[j * R + k]; }

  // Factorization of the last active block; MM steps tend to reuse it.
  // Pivoted LDL^T when the block is safely positive definite, otherwise a
  // complete orthogonal decomposition for the minimum-norm solution.
  mutable std::vector<std::size_t> cached_set;
  mutable Eigen::LDLT<Eigen::MatrixXd> ldlt;
  mutable Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  mutable bool use_ldlt = false;
  mutable bool valid = false;

  Eigen::VectorXd solve(const std::vector<std::size_t>& act, const Eigen::VectorXd& rhs) const {
    if (!valid || act != cached_set) {
      const std::size_t m = act.size();
      Eigen::MatrixXd A(m, m);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) A(i, j) = at(act[i], act[j]);
      ldlt.compute(A);
      use_ldlt = false;
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        const auto d = ldlt.vectorD();
        use_ldlt = d.minCoeff() > 1e-10 * d.maxCoeff();
      }
      if (!use_ldlt) cod.compute(A);
      cached_set = act;
      valid = true;
    }
    return use_ldlt ? Eigen::VectorXd(ldlt.solve(rhs)) : Eigen::VectorXd(cod.solve(rhs));
  }
};

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// Newton step on the current sign pattern. Moves theta toward the minimizer of
// the smooth objective on its orthant face, stopping where a coordinate changes
// sign. Returns true when the result satisfies the optimality conditions.
enum class PolishOutcome { optimal, blocked, incomplete };

PolishOutcome polish_once(const GramProblem& P, std::span<const double> b,
                          std::span<const double> lambda, std::vector<double>& theta,
                          std::vector<double>& grad, double kkt_tol) {
  const std::size_t R = P.R;
  std::vector<std::size_t> act;
  for (std::size_t k = 0; k < R; ++k)
    if (theta[k] != 0.0 && P.at(k, k) > 0.0) act.push_back(k);
  const std::size_t m = act.size();
  if (m > 0) {
    Eigen::VectorXd rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
      rhs(i) = -(grad[act[i]] + lambda[act[i]] * sign_of(theta[act[i]]));
    }
    const Eigen::VectorXd delta = P.solve(act, rhs);
    if (!delta.allFinite()) return PolishOutcome::incomplete;
    double t = 1.0;
    std::size_t blocking = m;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t k = act[i];
      if (lambda[k] == 0.0) continue;  // unpenalized coordinates may change sign freely
      const double next = theta[k] + delta(i);
      if (sign_of(next) != sign_of(theta[k])) {
        const double ti = theta[k] / -delta(i);
        if (ti < t) {
          t = ti;
          blocking = i;
        }
      }
    }
    for (std::size_t i = 0; i < m; ++i) theta[act[i]] += t * delta(i);
    if (blocking < m) theta[act[blocking]] = 0.0;
  }
  for (std::size_t k = 0; k < R; ++k) {
    double g = -b[k];
    for (std::size_t j = 0; j < R; ++j) g += P.at(k, j) * theta[j];
    grad[k] = g;
  }
  for (std::size_t k : act)
    if (theta[k] == 0.0) return PolishOutcome::blocked;
  for (std::size_t k = 0; k < R; ++k) {
    if (P.at(k, k) <= 0.0) continue;
    if (theta[k] == 0.0) {
      if (std::fabs(grad[k]) > lambda[k] + kkt_tol) return PolishOutcome::incomplete;
    } else if (std::fabs(grad[k] + lambda[k] * sign_of(theta[k])) > kkt_tol) {
      return PolishOutcome::incomplete;
    }
  }
  return PolishOutcome::optimal;
}

bool polish(const GramProblem& P, std::span<const double> b, std::span<const double> lambda,
            std::vector<double>& theta, std::vector<double>& grad, double kkt_tol) {
  for (std::size_t i = 0; i <= P.R; ++i) {
    const PolishOutcome o = polish_once(P, b, lambda, theta, grad, kkt_tol);
    if (o != PolishOutcome::blocked) return o == PolishOutcome::optimal;
  }
  return false;
}

LassoResult solve_gram(const GramProblem& P, std::span<const double> b,
                       std::span<const double> lambda, std::span<const double> start,
                       const LassoOptions& options) {
  const std::size_t R = P.R;
  LassoResult out;
  out.theta.assign(start.begin(), start.end());
  std::vector<double> grad(R);
  double bscale = 1.0;
  for (std::size_t k = 0; k < R; ++k) {
    double g = -b[k];
    for (std::size_t j = 0; j < R; ++j) g += P.at(k, j) * out.theta[j];
    grad[k] = g;
    bscale = std::max(bscale, std::fabs(b[k]));
  }
  const double kkt_tol = 1e-11 * bscale;

  std::vector<int> pattern(R, 0), previous(R, 2), polished(R, 2);
  // A warm start usually carries the optimal sign pattern already.
  for (std::size_t k = 0; k < R; ++k) pattern[k] = sign_of(out.theta[k]);
  if (std::any_of(pattern.begin(), pattern.end(), [](int v) { return v != 0; })) {
    polished = pattern;
    if (polish(P, b, lambda, out.theta, grad, kkt_tol)) {
      out.converged = true;
      return out;
    }
  }
  for (out.sweeps = 0; out.sweeps < options.max_sweeps;) {
    ++out.sweeps;
    double max_change = 0.0;
    for (std::size_t k = 0; k < R; ++k) {
      const double gkk = P.at(k, k);
      if (gkk <= 0.0) continue;  // component has no support on the data
      const double old = out.theta[k];
      const double z = old - grad[k] / gkk;
      const double updated = soft_threshold(z, lambda[k] / gkk);
      const double delta = updated - old;
      if (delta != 0.0) {
        const double* row = &P.G[k * R];
        for (std::size_t j = 0; j < R; ++j) grad[j] += delta * row[j];
        out.theta[k] = updated;
        max_change = std::max(max_change, std::fabs(delta));
      }
    }
    if (max_change < options.tolerance) {
      out.converged = true;
      break;
    }
    for (std::size_t k = 0; k < R; ++k) pattern[k] = sign_of(out.theta[k]);
    if (pattern == previous && pattern != polished) {
      polished = pattern;
      if (polish(P, b, lambda, out.theta, grad, kkt_tol)) {
        out.converged = true;
        break;
      }
      for (std::size_t k = 0; k < R; ++k) pattern[k] = sign_of(out.theta[k]);
    }
    previous = pattern;
  }
  return out;
}

std::vector<double> lasso_thresholds(std::size_t n, double curvature, double rho,
                                     std::span<const double> w) {
  std::vector<double> lambda(w.size());
  const double scale = rho * static_cast<double>(n) / curvature;
  for (std::size_t k = 0; k < w.size(); ++k) lambda[k] = scale * w[k];
  return lambda;
}

}  // namespace

LassoResult solve_weighted_lasso(const DesignMatrix& design, std::span<const double> target,
                                 double curvature, double rho, std::span<const double> w,
                                 std::span<const double> start, const LassoOptions& options) {
  const GramProblem P(design);
  std::vector<double> b(design.components());
  design.transpose_times(target, b);
  return solve_gram(P, b, lasso_thresholds(design.samples(), curvature, rho, w), start, options);
}

std::vector<double> lasso_target(std::span<const double> theta_tilde,
                                 std::span<const double> counts, const DesignMatrix& design,
                                 double curvature) {
  std::vector<double> q(design.samples());
  design.predictor(theta_tilde, q);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] += (counts[i] - guarded_exp(q[i])) / curvature;
  return q;
}

LassoResult weighted_lasso_step(std::span<const double> theta_tilde,
                                std::span<const double> counts, const DesignMatrix& design,
                                double rho, std::span<const double> w, double curvature,
                                const LassoOptions& options) {
  if (!(curvature > 0.0)) throw InvalidArgument("majorizer curvature must be positive");
  const auto q = lasso_target(theta_tilde, counts, design, curvature);
  return solve_weighted_lasso(design, q, curvature, rho, w, theta_tilde, options);
}

QuadraticMajorizer::QuadraticMajorizer(std::span<const double> theta_tilde,
                                       std::span<const double> counts,
                                       const DesignMatrix& design, double curvature)
    : design_(&design),
      center_(theta_tilde.begin(), theta_tilde.end()),
      gradient_(nll_gradient(theta_tilde, counts, design)),
      value_(neg_log_likelihood(theta_tilde, counts, design)),
      curvature_(curvature) {}

double QuadraticMajorizer::operator()(std::span<const double> theta) const {
  const std::size_t R = center_.size();
  std::vector<double> d(R);
  double linear = 0.0;
  for (std::size_t k = 0; k < R; ++k) {
    d[k] = theta[k] - center_[k];
    linear += gradient_[k] * d[k];
  }
  std::vector<double> u(design_->samples());
  design_->predictor(d, u);
  return value_ + linear +
         curvature_ / (2.0 * design_->samples()) * kernels::sum_squares(u);
}

QuadraticMajorizer majorizer(std::span<const double> theta_tilde, std::span<const double> counts,
                             const DesignMatrix& design, double curvature) {
  return QuadraticMajorizer(theta_tilde, counts, design, curvature);
}

Minimizer minimize_penalized(const DesignMatrix& design, std::span<const double> counts,
                             std::span<const double> w, double rho, double curvature,
                             const SolverConfig& config) {
  const std::size_t n = design.samples();
  const std::size_t R = design.components();
  if (n == 0) throw InvalidArgument("no data");
  if (counts.size() != n || w.size() != R) throw InvalidArgument("dimension mismatch");
  if (!(curvature > 0.0)) throw InvalidArgument("majorizer curvature must be positive");
  check_counts(counts);

  constexpr std::size_t kMaxBacktracks = 40;
  const double log_fact = log_factorial_sum(counts);
  const LassoOptions inner{config.eps_inner, config.max_inner};

  Minimizer out;
  auto& diag = out.diagnostics;
  out.theta.assign(R, 0.0);
  PoissonState state(n);
  double objective = state.evaluate(out.theta, counts, design, log_fact);
  std::vector<double> target(n);
  std::vector<double> b(R);
  PoissonState trial(n);
  const GramProblem gram(design);

  for (diag.outer_iterations = 0; diag.outer_iterations < config.max_outer;) {
    ++diag.outer_iterations;
    // The bound H <= (Y/n) Phi Phi^T only holds while every mean stays below
    // Y; doubling the curvature restores descent when an iterate leaves it.
    double c = curvature;
    bool accepted = false;
    LassoResult step;
    double trial_objective = objective;
    for (std::size_t bt = 0; bt <= kMaxBacktracks; ++bt, c *= 2.0) {
      for (std::size_t i = 0; i < n; ++i)
        target[i] = state.eta[i] + (counts[i] - state.mean[i]) / c;
      design.transpose_times(target, b);
      step = solve_gram(gram, b, lasso_thresholds(n, c, rho, w), out.theta, inner);
      diag.inner_sweeps += step.sweeps;
      trial.clamped = false;
      trial_objective =
          trial.evaluate(step.theta, counts, design, log_fact) + rho * penalty(step.theta, w);
      if (trial_objective <= objective + 1e-14 * (1.0 + std::fabs(objective))) {
        accepted = true;
        break;
      }
      ++diag.backtracks;
    }
    if (!accepted) {
      // No descent at any curvature: theta is stationary to rounding.
      diag.final_step = 0.0;
      diag.converged = true;
      break;
    }
    diag.final_step = distance(step.theta, out.theta);
    out.theta = std::move(step.theta);
    std::swap(state, trial);
    diag.clamped = diag.clamped || state.clamped;
    objective = trial_objective;
    diag.objective_trace.push_back(objective);
    if (diag.final_step < config.eps_outer) {
      diag.converged = true;
      break;
    }
  }
  diag.final_objective = objective;
  return out;
}

namespace {

std::atomic<std::uint64_t> g_fit_calls{0};

FittedModel fit_impl(const CountDataset& data, std::shared_ptr<const SpatialBasis> basis,
                     const SolverConfig& config, const DesignMatrix& design,
                     std::vector<double> w, std::size_t floored) {
  g_fit_calls.fetch_add(1, std::memory_order_relaxed);
  const double n = static_cast<double>(data.size());
  const double Y = resolve_ceiling(config, data.max_count());
  const double rho = std::pow(n, -config.gamma);
  Minimizer m = minimize_penalized(design, data.counts, w, rho, Y, config);
  FittedModel model;
  model.basis = std::move(basis);
  model.gamma = config.gamma;
  model.theta = std::move(m.theta);
  model.diagnostics = std::move(m.diagnostics);
  model.diagnostics.floored_weights = floored;
  return model;
}

void check_inputs(const CountDataset& data, const std::shared_ptr<const SpatialBasis>& basis,
                  const SolverConfig& config) {
  if (!basis) throw InvalidArgument("fit needs a basis");
  if (data.empty()) throw InvalidArgument("no data");
  if (data.regions.size() != data.counts.size()) throw InvalidArgument("dataset size mismatch");
  check_counts(data.counts);
  validate(config, data.max_count());
}

}  // namespace

std::uint64_t fit_calls() noexcept { return g_fit_calls.load(std::memory_order_relaxed); }

FittedModel fit(const CountDataset& data, std::shared_ptr<const SpatialBasis> basis,
                const SolverConfig& config, WeightsMode mode) {
  check_inputs(data, basis, config);
  DesignMatrix design(*basis, data.regions);
  std::size_t floored = 0;
  auto w = penalty_weights(design, config, mode, &floored);
  return fit_impl(data, std::move(basis), config, design, std::move(w), floored);
}

FittedModel fit_with_weights(const CountDataset& data, std::shared_ptr<const SpatialBasis> basis,
                             const SolverConfig& config, std::span<const double> weights) {
  check_inputs(data, basis, config);
  if (weights.size() != basis->size()) throw InvalidArgument("weight vector has wrong length");
  for (double x : weights)
    if (!(x >= 0.0)) throw InvalidArgument("penalty weights must be nonnegative");
  DesignMatrix design(*basis, data.regions);
  return fit_impl(data, std::move(basis), config, design,
                  std::vector<double>(weights.begin(), weights.end()), 0);
}

OracleOptimum oracle_optimum(const TruthModel& truth, std::span<const std::size_t> regions,
                             const SpatialBasis& basis, const SolverConfig& config) {
  if (regions.empty()) throw InvalidArgument("oracle optimum needs at least one region");
  std::vector<double> expected(regions.size());
  double max_mean = 0.0;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    expected[i] = truth.mean(regions[i]);
    max_mean = std::max(max_mean, expected[i]);
  }
  const DesignMatrix design(basis, regions);
  const std::vector<double> w(basis.size(), 0.0);
  const double Y = std::max(resolve_ceiling(config, max_mean), max_mean);
  Minimizer m = minimize_penalized(design, expected, w, 0.0, Y, config);
  OracleOptimum out;
  out.risk = kl_per_sample(m.theta, truth, regions, basis);
  out.theta = std::move(m.theta);
  out.diagnostics = std::move(m.diagnostics);
  return out;
}

}  // namespace spint
