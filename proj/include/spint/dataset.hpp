#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace spint {

/// Observation pairs (r_i, y_i). Counts are stored as doubles so the same
/// type can carry expected counts for the oracle fits.
struct CountDataset {
  std::vector<std::size_t> regions;
  std::vector<double> counts;

  std::size_t size() const noexcept { return regions.size(); }
  bool empty() const noexcept { return regions.empty(); }
  void add(std::size_t region, double count) {
    regions.push_back(region);
    counts.push_back(count);
  }
  double max_count() const noexcept;
};

/// One observation per region with the binned event count.
CountDataset dataset_from_bins(std::span<const std::size_t> bin_counts);

}  // namespace spint
