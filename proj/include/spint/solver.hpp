#pragma once

// Penalized Poisson fit
//   theta_hat = argmin V(theta) + n^-gamma ||w . theta||_1
// by majorization-minimization: at each outer step V is replaced by the
// quadratic upper bound
//   Q(theta; t) = V(t) + v^T (theta - t) + (Y / 2n) ||Phi^T (theta - t)||^2,
// whose penalized minimizer is a weighted lasso solved by coordinate descent.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spint/basis.hpp"
#include "spint/dataset.hpp"
#include "spint/model.hpp"
#include "spint/truth.hpp"

namespace spint {

enum class WeightsMode { standard, zero };

struct SolverConfig {
  double gamma = 0.499;
  double count_ceiling = 0.0;  // Y; 0 selects 2 * max count (at least 1)
  double eps_outer = 1e-6;
  double eps_inner = 1e-8;
  std::size_t max_outer = 500;
  std::size_t max_inner = 10000;
  double weight_floor = 1e-8;  // lower bound on nonzero-mode penalty weights
};

/// Throws InvalidArgument when the configuration is unusable for data whose
/// largest count is `max_count`.
void validate(const SolverConfig& config, double max_count);

/// The count ceiling Y actually used for data with the given largest count.
double resolve_ceiling(const SolverConfig& config, double max_count);

FittedModel fit(const CountDataset& data, std::shared_ptr<const SpatialBasis> basis,
                const SolverConfig& config, WeightsMode mode = WeightsMode::standard);

/// As fit(), with caller-supplied penalty weights (one per component,
/// floored at config.weight_floor when positive flooring is requested).
FittedModel fit_with_weights(const CountDataset& data, std::shared_ptr<const SpatialBasis> basis,
                             const SolverConfig& config, std::span<const double> weights);

/// Number of fit() / fit_with_weights() calls made by this process so far.
std::uint64_t fit_calls() noexcept;

/// Penalty weights for a dataset under a weights mode, including the floor.
/// `floored` receives the number of weights raised to the floor.
std::vector<double> penalty_weights(const DesignMatrix& design, const SolverConfig& config,
                                    WeightsMode mode, std::size_t* floored = nullptr);

/// V(theta) + rho * sum_k w_k |theta_k|.
double penalized_objective(std::span<const double> theta, std::span<const double> counts,
                           const DesignMatrix& design, double rho, std::span<const double> w);

struct Minimizer {
  std::vector<double> theta;
  SolverDiagnostics diagnostics;
};

/// The MM iteration on an explicit design; `curvature` is Y.
Minimizer minimize_penalized(const DesignMatrix& design, std::span<const double> counts,
                             std::span<const double> w, double rho, double curvature,
                             const SolverConfig& config);

/// Quadratic surrogate of V expanded at theta_tilde.
class QuadraticMajorizer {
 public:
  QuadraticMajorizer(std::span<const double> theta_tilde, std::span<const double> counts,
                     const DesignMatrix& design, double curvature);

  double value() const noexcept { return value_; }  // Q(t; t) = V(t)
  std::span<const double> gradient() const noexcept { return gradient_; }
  double curvature() const noexcept { return curvature_; }

  double operator()(std::span<const double> theta) const;

 private:
  const DesignMatrix* design_;
  std::vector<double> center_;
  std::vector<double> gradient_;
  double value_;
  double curvature_;
};

QuadraticMajorizer majorizer(std::span<const double> theta_tilde, std::span<const double> counts,
                             const DesignMatrix& design, double curvature);

/// sign(z) * max(|z| - t, 0).
double soft_threshold(double z, double t) noexcept;

struct LassoOptions {
  double tolerance = 1e-8;      // stop when the largest coordinate change is below this
  std::size_t max_sweeps = 10000;
};

struct LassoResult {
  std::vector<double> theta;
  std::size_t sweeps = 0;
  bool converged = false;
};

/// argmin (c / 2n) ||q - Phi^T theta||^2 + rho ||w . theta||_1 by cyclic
/// coordinate descent (components 0..R-1) from `start`.
LassoResult solve_weighted_lasso(const DesignMatrix& design, std::span<const double> target,
                                 double curvature, double rho, std::span<const double> w,
                                 std::span<const double> start, const LassoOptions& options);

double weighted_lasso_objective(const DesignMatrix& design, std::span<const double> target,
                                double curvature, double rho, std::span<const double> w,
                                std::span<const double> theta);

/// q(t) = Phi^T t + (y - h(t)) / Y, the least-squares target of the surrogate.
std::vector<double> lasso_target(std::span<const double> theta_tilde,
                                 std::span<const double> counts, const DesignMatrix& design,
                                 double curvature);

/// One MM inner solve from theta_tilde.
LassoResult weighted_lasso_step(std::span<const double> theta_tilde,
                                std::span<const double> counts, const DesignMatrix& design,
                                double rho, std::span<const double> w, double curvature,
                                const LassoOptions& options);

struct OracleOptimum {
  std::vector<double> theta;
  double risk = 0.0;  // KL per sample at theta
  SolverDiagnostics diagnostics;
};

/// theta* = argmin KL per sample. Uses the MM iteration without penalty on
/// the expected counts E[y | r_i].
OracleOptimum oracle_optimum(const TruthModel& truth, std::span<const std::size_t> regions,
                             const SpatialBasis& basis, const SolverConfig& config);

}  // namespace spint
