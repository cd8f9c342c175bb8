#include "spint/dataset.hpp"

#include <algorithm>

namespace spint {

double CountDataset::max_count() const noexcept {
  double m = 0.0;
  for (double c : counts) m = std::max(m, c);
  return m;
}

CountDataset dataset_from_bins(std::span<const std::size_t> bin_counts) {
  CountDataset d;
  for (std::size_t r = 0; r < bin_counts.size(); ++r)
    d.add(r, static_cast<double>(bin_counts[r]));
  return d;
}

}  // namespace spint
