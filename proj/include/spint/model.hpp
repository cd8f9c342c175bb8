#pragma once

// Poisson model class: p_theta(y | r) is Poisson with mean exp(phi(r)^T theta).

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "spint/basis.hpp"
#include "spint/dataset.hpp"
#include "spint/truth.hpp"

namespace spint {

/// Linear predictors above this value are clamped before exponentiation.
inline constexpr double kMaxLinearPredictor = 700.0;

struct SolverDiagnostics {
  std::size_t outer_iterations = 0;
  std::size_t inner_sweeps = 0;
  std::size_t backtracks = 0;
  bool converged = false;
  bool clamped = false;           // some exp() argument hit kMaxLinearPredictor
  std::size_t floored_weights = 0;
  double final_objective = 0.0;
  double final_step = 0.0;        // ||theta_new - theta_old||_2 of the last outer step
  std::vector<double> objective_trace;  // penalized objective after each outer step
};

struct FittedModel {
  std::shared_ptr<const SpatialBasis> basis;
  double gamma = 0.0;
  std::vector<double> theta;
  SolverDiagnostics diagnostics;

  const RegionGrid& grid() const { return basis->grid(); }
};

/// exp(min(eta, kMaxLinearPredictor)); sets *clamped when the guard fires.
double guarded_exp(double eta, bool* clamped = nullptr) noexcept;

double predict_mean(const SpatialBasis& basis, std::span<const double> theta, std::size_t r);
double predict_mean(const FittedModel& model, std::size_t r);

/// Region means exp(phi(r)^T theta) for every region.
std::vector<double> predict_all(const SpatialBasis& basis, std::span<const double> theta);

/// V(theta) = n^-1 sum_i [exp(eta_i) - y_i eta_i + ln(y_i!)], eta = Phi^T theta.
double neg_log_likelihood(std::span<const double> theta, std::span<const double> counts,
                          const DesignMatrix& design);
double neg_log_likelihood(std::span<const double> theta, const CountDataset& data,
                          const SpatialBasis& basis);

/// n^-1 Phi (h(theta) - y).
std::vector<double> nll_gradient(std::span<const double> theta, std::span<const double> counts,
                                 const DesignMatrix& design);
std::vector<double> nll_gradient(std::span<const double> theta, const CountDataset& data,
                                 const SpatialBasis& basis);

/// Point estimate of the intensity: region mean over region area.
double point_intensity(const FittedModel& model, Location x);

/// KL divergence per sample between the truth and the Poisson model over
/// the given sample regions. Throws NumericalError if it is infinite.
double kl_per_sample(std::span<const double> theta, const TruthModel& truth,
                     std::span<const std::size_t> regions, const SpatialBasis& basis);

/// KL(truth(. | mean mu) || Poisson(m)) for a single region.
double kl_single(const TruthModel& truth, double mu, double m);

}  // namespace spint
