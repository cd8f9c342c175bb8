#pragma once

// Synthetic spatial processes on 1D domains: closed-form intensities,
// exact region means, inversion-sampled Poisson point patterns, and
// per-region count draws.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "spint/dataset.hpp"
#include "spint/grid.hpp"
#include "spint/truth.hpp"

namespace spint {

enum class IntensityKind { constant, exp_decay, gauss_peak, sinusoid, sqrt_growth, table };

class IntensitySpec {
 public:
  /// lambda(x) = c
  static IntensitySpec constant(double c);
  /// lambda(x) = amplitude * exp(-x / scale)
  static IntensitySpec exp_decay(double amplitude, double scale);
  /// lambda(x) = mass * N(x; center, sd^2)
  static IntensitySpec gauss_peak(double mass, double center, double sd);
  /// lambda(x) = amplitude * sin(2 pi x / period) + offset
  static IntensitySpec sinusoid(double amplitude, double period, double offset);
  /// lambda(x) = coef * sqrt(x), x >= 0
  static IntensitySpec sqrt_growth(double coef);
  /// Piecewise-constant intensity over equal-width bins of [lo, hi]; zero outside.
  static IntensitySpec table(double lo, double hi, std::vector<double> values);

  // The built-in experiment processes.
  static IntensitySpec decaying();  // 10 exp(-x / 50)
  static IntensitySpec lambda1();   // 500 / sqrt(2 pi 25^2) exp(-(x - 50)^2 / (2 25^2))
  static IntensitySpec lambda2();   // 5 sin(2 pi x / 50) + 5
  static IntensitySpec lambda3();   // (3/8) sqrt(x)
  /// Lookup by name: "decaying", "lambda1", "lambda2", "lambda3".
  static IntensitySpec named(const std::string& name);

  IntensityKind kind() const noexcept { return kind_; }
  const std::vector<double>& params() const noexcept { return params_; }
  const std::vector<double>& table_values() const noexcept { return values_; }

  double density(double x) const;
  /// A with A' = lambda on the process's natural domain.
  double antiderivative(double x) const;
  double integral(double a, double b) const { return antiderivative(b) - antiderivative(a); }

  /// Throws InvalidArgument unless lambda >= 0 on [lo, hi].
  void check_domain(double lo, double hi) const;

 private:
  IntensitySpec(IntensityKind kind, std::vector<double> params, std::vector<double> values = {});
  IntensityKind kind_;
  std::vector<double> params_;
  std::vector<double> values_;
};

std::string to_string(IntensityKind kind);
IntensityKind intensity_kind_from_string(const std::string& s);

/// Exact E[y | r] = integral of lambda over each region of a 1D grid.
std::vector<double> region_means(const IntensitySpec& spec, const RegionGrid& grid);

TruthModel make_truth(const IntensitySpec& spec, const RegionGrid& grid, CountFamily family,
                      double failures = 100.0);

/// Event locations on [lo, hi]: N ~ Poisson(total mass), each location by
/// inverting the normalized cumulative intensity. Uses stream 0 of `seed`.
std::vector<double> sample_poisson_process(const IntensitySpec& spec, double lo, double hi,
                                           std::uint64_t seed);

/// Independent y_i ~ p(y | r_i). Samples in region r consume stream r + 1 of
/// `seed` in order of appearance, so regions can be drawn independently.
std::vector<double> sample_counts(const TruthModel& truth, std::span<const std::size_t> regions,
                                  std::uint64_t seed);

/// Axis-aligned box; y limits are ignored on 1D grids.
struct RegionMask {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double y_lo = -std::numeric_limits<double>::infinity();
  double y_hi = std::numeric_limits<double>::infinity();
};

/// masked[r] is true when the center of region r lies inside some mask.
/// Throws when a mask leaves the domain or every region is masked.
std::vector<bool> masked_regions(const RegionGrid& grid, std::span<const RegionMask> masks);

/// Regions not covered by any mask, ascending.
std::vector<std::size_t> observed_regions(const RegionGrid& grid,
                                          std::span<const RegionMask> masks);

/// Removes every sample whose region is masked.
CountDataset mask_regions(const CountDataset& data, const RegionGrid& grid,
                          std::span<const RegionMask> masks);

}  // namespace spint
