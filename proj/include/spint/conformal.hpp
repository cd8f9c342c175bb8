#pragma once

// Full-conformal intensity intervals. For a region r and every candidate
// count c in {0..Y} the model is refitted on the data plus (r, c); c is
// admitted when its absolute residual ranks no higher than
// ceil((1 - alpha)(n + 1)) among the n + 1 residuals of that refit.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "spint/basis.hpp"
#include "spint/dataset.hpp"
#include "spint/solver.hpp"

namespace spint {

enum class RefitWeights { recompute, frozen };

struct ConformalConfig {
  double alpha = 0.2;
  double count_ceiling = -1.0;  // Y; negative uses the solver's ceiling rule
  RefitWeights refit = RefitWeights::recompute;
  WeightsMode weights = WeightsMode::standard;
  unsigned threads = 1;        // 0 = hardware concurrency
};

void validate(const ConformalConfig& config, double max_count);

/// pi = (n+1)^-1 * (1 + #{i : e_i <= new_residual}); the candidate's own
/// residual counts as the (n+1)-th term.
double conformity_score(std::span<const double> residuals, double new_residual);

/// ceil((1 - alpha)(n + 1)).
std::size_t admission_rank(double alpha, std::size_t n);

struct IntensityInterval {
  std::size_t region = 0;
  std::vector<int> admitted;  // ascending
  double lo = 0.0;            // min admitted / area
  double hi = 0.0;            // max admitted / area
  bool contiguous = true;
  std::size_t refits = 0;
  std::size_t nonconverged = 0;  // candidate refits that hit max_outer

  bool empty() const noexcept { return admitted.empty(); }
  double size() const noexcept { return hi - lo; }
  bool admits(double count) const;
};

/// Candidate ceiling actually used for a dataset.
int candidate_ceiling(const ConformalConfig& config, const SolverConfig& solver,
                      const CountDataset& data);

IntensityInterval region_interval(std::size_t region, const CountDataset& data,
                                  std::shared_ptr<const SpatialBasis> basis,
                                  const SolverConfig& solver, const ConformalConfig& config);

IntensityInterval intensity_interval(Location x, const CountDataset& data,
                                     std::shared_ptr<const SpatialBasis> basis,
                                     const SolverConfig& solver, const ConformalConfig& config);

/// One interval per requested region; (region, candidate) refits run in
/// parallel and are aggregated in a fixed order.
std::vector<IntensityInterval> interval_map(std::span<const std::size_t> regions,
                                            const CountDataset& data,
                                            std::shared_ptr<const SpatialBasis> basis,
                                            const SolverConfig& solver,
                                            const ConformalConfig& config);

/// interval_map over every region of the basis grid.
std::vector<IntensityInterval> interval_map(const CountDataset& data,
                                            std::shared_ptr<const SpatialBasis> basis,
                                            const SolverConfig& solver,
                                            const ConformalConfig& config);

}  // namespace spint
