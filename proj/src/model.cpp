#include "spint/model.hpp"

#include <cmath>
#include <limits>

#include "spint/error.hpp"
#include "spint/kernels.hpp"

namespace spint {

double guarded_exp(double eta, bool* clamped) noexcept {
  if (eta > kMaxLinearPredictor) {
    if (clamped) *clamped = true;
    eta = kMaxLinearPredictor;
  }
  return std::exp(eta);
}

double predict_mean(const SpatialBasis& basis, std::span<const double> theta, std::size_t r) {
  if (r >= basis.size()) throw InvalidArgument("region index out of range");
  const auto phi = basis.at(r);
  double eta = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) eta += phi[k] * theta[k];
  return guarded_exp(eta);
}

double predict_mean(const FittedModel& model, std::size_t r) {
  return predict_mean(*model.basis, model.theta, r);
}

std::vector<double> predict_all(const SpatialBasis& basis, std::span<const double> theta) {
  std::vector<double> m(basis.size());
  for (std::size_t r = 0; r < m.size(); ++r) m[r] = predict_mean(basis, theta, r);
  return m;
}

double neg_log_likelihood(std::span<const double> theta, std::span<const double> counts,
                          const DesignMatrix& design) {
  const std::size_t n = design.samples();
  std::vector<double> eta(n), h(n);
  design.predictor(theta, eta);
  double log_fact = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    h[i] = guarded_exp(eta[i]);
    log_fact += std::lgamma(counts[i] + 1.0);
  }
  return (kernels::poisson_deviance_terms(h, counts, eta) + log_fact) / static_cast<double>(n);
}

double neg_log_likelihood(std::span<const double> theta, const CountDataset& data,
                          const SpatialBasis& basis) {
  return neg_log_likelihood(theta, data.counts, DesignMatrix(basis, data.regions));
}

std::vector<double> nll_gradient(std::span<const double> theta, std::span<const double> counts,
                                 const DesignMatrix& design) {
  const std::size_t n = design.samples();
  std::vector<double> eta(n);
  design.predictor(theta, eta);
  for (double& e : eta) e = guarded_exp(e);
  kernels::subtract(eta, counts, eta);
  std::vector<double> v(design.components());
  design.transpose_times(eta, v);
  for (double& x : v) x /= static_cast<double>(n);
  return v;
}

std::vector<double> nll_gradient(std::span<const double> theta, const CountDataset& data,
                                 const SpatialBasis& basis) {
  return nll_gradient(theta, data.counts, DesignMatrix(basis, data.regions));
}

double point_intensity(const FittedModel& model, Location x) {
  const std::size_t r = model.grid().locate(x);
  return predict_mean(model, r) / model.grid().region_area();
}

namespace {

double nb_log_pmf(double y, double mu, double nu) {
  return std::lgamma(y + nu) - std::lgamma(nu) - std::lgamma(y + 1.0) +
         nu * std::log(nu / (nu + mu)) + y * std::log(mu / (nu + mu));
}

double kl_negative_binomial(double mu, double nu, double m) {
  constexpr double kTail = 1e-12;
  constexpr double kMaxTerms = 1e7;
  const double log_m = std::log(m);
  double kl = 0.0;
  double mass = 0.0;
  for (double y = 0.0; y < kMaxTerms; y += 1.0) {
    const double lp = nb_log_pmf(y, mu, nu);
    const double p = std::exp(lp);
    if (p > 0.0) kl += p * (lp - (y * log_m - m - std::lgamma(y + 1.0)));
    mass += p;
    if (y >= mu && 1.0 - mass < kTail) break;
  }
  return kl;
}

}  // namespace

double truth_log_pmf(const TruthModel& truth, double mu, double y) {
  if (mu <= 0.0) return y == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (truth.family == CountFamily::poisson) return y * std::log(mu) - mu - std::lgamma(y + 1.0);
  return nb_log_pmf(y, mu, truth.failures);
}

double kl_single(const TruthModel& truth, double mu, double m) {
  if (mu <= 0.0) return m;  // truth is a point mass at zero
  if (!(m > 0.0) || !std::isfinite(m))
    throw NumericalError("KL divergence is infinite: model mean is zero where truth has mass");
  if (truth.family == CountFamily::poisson) return mu * std::log(mu / m) - mu + m;
  return kl_negative_binomial(mu, truth.failures, m);
}

double kl_per_sample(std::span<const double> theta, const TruthModel& truth,
                     std::span<const std::size_t> regions, const SpatialBasis& basis) {
  if (regions.empty()) throw InvalidArgument("KL per sample needs at least one region");
  std::vector<double> cache(basis.size(), std::numeric_limits<double>::quiet_NaN());
  double total = 0.0;
  for (std::size_t r : regions) {
    if (std::isnan(cache.at(r)))
      cache[r] = kl_single(truth, truth.mean(r), predict_mean(basis, theta, r));
    total += cache[r];
  }
  const double kl = total / static_cast<double>(regions.size());
  if (!std::isfinite(kl)) throw NumericalError("KL divergence is not finite");
  return kl;
}

}  // namespace spint
