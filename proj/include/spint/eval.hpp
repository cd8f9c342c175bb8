#pragma once

// Monte-Carlo harnesses: empirical coverage and interval sizes of the
// conformal intervals on synthetic processes, and an empirical check of the
// excess-risk bound R(theta_hat) <= R(theta*) + 2 n^-gamma ||w . theta*||_1.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spint/conformal.hpp"
#include "spint/grid.hpp"
#include "spint/solver.hpp"
#include "spint/synth.hpp"

namespace spint {

struct ProcessSetup {
  std::string name;
  IntensitySpec intensity;
  CountFamily family = CountFamily::negative_binomial;
  double failures = 100.0;

  /// lambda1..lambda3 with negative binomial counts (failures = 100), or the
  /// decaying process with Poisson counts.
  static ProcessSetup builtin(const std::string& name);
};

struct ExperimentConfig {
  RegionGrid grid = RegionGrid::interval(0.0, 100.0, 20);
  double support = 0.0;  // 0 = grid diameter (support covers every region)
  std::vector<RegionMask> masks;
  double alpha = 0.2;
  double count_ceiling = -1.0;  // negative = default_ceiling(truth)
  std::size_t repetitions = 50;
  std::size_t draws_per_region = 1;  // training samples per unmasked region
  std::uint64_t seed = 1;
  SolverConfig solver;  // gamma defaults to 0.499
  RefitWeights refit = RefitWeights::recompute;
  unsigned threads = 1;
};

/// Smallest Y with P(y > Y) < 1e-3 in the region with the largest mean.
int default_ceiling(const TruthModel& truth);

struct CoverageResult {
  std::string process;
  WeightsMode mode = WeightsMode::standard;
  std::size_t repetitions = 0;
  int candidate_ceiling = 0;
  double coverage_observed = 0.0;  // fresh draws pooled over unmasked regions
  double coverage_all = 0.0;       // fresh draws pooled over every region
  double coverage_mean = 0.0;      // expected counts inside [lo, hi], every region
  std::vector<bool> masked;
  std::vector<double> region_coverage;
  std::vector<double> mean_size;   // mean (hi - lo) per region, counts per unit area
  std::size_t empty_intervals = 0;
  std::size_t noncontiguous_intervals = 0;
  std::size_t refits = 0;
  std::size_t nonconverged_refits = 0;
};

/// Per repetition: draw draws_per_region training counts per unmasked region, build the
/// interval of every region, draw one fresh count per region and record
/// containment. Repetitions use derived seeds and are aggregated by index.
CoverageResult coverage_experiment(const ProcessSetup& process, const ExperimentConfig& config,
                                   WeightsMode mode);

struct SizeComparison {
  CoverageResult regularized;
  CoverageResult unregularized;
  double ratio_masked = 0.0;    // mean over masked regions of size_unreg / size_reg
  double ratio_unmasked = 0.0;  // same over unmasked regions
  std::vector<double> region_ratio;
};

/// Per-region size ratios of two experiments on the same grid and masks.
SizeComparison compare_sizes(CoverageResult regularized, CoverageResult unregularized);

/// Runs the regularized and the unregularized (w = 0) intervals on the same
/// seeds.
SizeComparison size_comparison(const ProcessSetup& process, const ExperimentConfig& config);

/// max(0, 1 - 2R exp(-w_o^2 n^(1 - 2 gamma) / (2 Y^2))).
double theorem_probability(std::size_t regions, double w_min, double ceiling, double gamma,
                           double n);
/// The expression inside max(0, .).
double theorem_probability_raw(std::size_t regions, double w_min, double ceiling, double gamma,
                               double n);

struct TheoremConfig {
  RegionGrid grid = RegionGrid::interval(0.0, 100.0, 5);
  double support = 0.0;  // 0 = grid diameter
  double count_ceiling = 10.0;  // Y in the probability expression and the solver
  std::vector<std::size_t> sample_sizes{100, 1000, 10000};
  std::size_t repetitions = 200;
  std::uint64_t seed = 1;
  SolverConfig solver;
  unsigned threads = 1;
};

struct TheoremPoint {
  std::size_t n = 0;
  double oracle_risk = 0.0;      // R(theta*)
  double slack = 0.0;            // 2 n^-gamma ||w . theta*||_1
  double w_min = 0.0;
  double probability_bound = 0.0;
  bool vacuous = true;           // bound <= 0
  std::size_t satisfied = 0;
  std::size_t repetitions = 0;
  double rate = 0.0;
  double mean_excess_risk = 0.0;  // mean of R(theta_hat) - R(theta*)
  std::size_t ceiling_exceedances = 0;  // sampled counts above Y
  bool oracle_converged = false;
  std::size_t nonconverged_fits = 0;
  /// rate >= bound (always true when vacuous).
  bool consistent() const noexcept { return vacuous || rate >= probability_bound; }
};

struct TheoremReport {
  std::string process;
  std::vector<TheoremPoint> points;
};

/// Samples are placed on regions i mod R (balanced design); counts are
/// redrawn per repetition while theta* is fixed per n.
TheoremReport theorem_check(const std::string& name, const TruthModel& truth,
                            const TheoremConfig& config);

}  // namespace spint
