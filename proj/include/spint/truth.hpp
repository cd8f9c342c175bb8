#pragma once

#include <cstddef>
#include <vector>

namespace spint {

enum class CountFamily { poisson, negative_binomial };

/// Known conditional p(y | r) of a synthetic process: one mean per region
/// plus the count family. Negative binomial uses (mean, failures) with
/// variance mu + mu^2 / failures.
struct TruthModel {
  CountFamily family = CountFamily::poisson;
  std::vector<double> means;
  double failures = 100.0;

  double mean(std::size_t r) const { return means.at(r); }
  double variance(std::size_t r) const {
    const double mu = means.at(r);
    return family == CountFamily::poisson ? mu : mu + mu * mu / failures;
  }
};

/// ln p(y | mean mu) under the truth's count family.
double truth_log_pmf(const TruthModel& truth, double mu, double y);

}  // namespace spint
