#pragma once

// Equal-area partition of a 1D interval or a 2D rectangle into indexed
// regions. Region indices are 0-based; in 2D the x index varies fastest
// (r = iy * nx + ix).

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace spint {

enum class GridKind { interval1d, rect2d };

struct Location {
  double x = 0.0;
  double y = 0.0;  // ignored on 1D grids
};

class RegionGrid {
 public:
  static RegionGrid interval(double lo, double hi, std::size_t count);
  static RegionGrid rect(double x_lo, double x_hi, double y_lo, double y_hi, std::size_t nx,
                         std::size_t ny);

  GridKind kind() const noexcept { return kind_; }
  std::size_t dims() const noexcept { return kind_ == GridKind::interval1d ? 1 : 2; }
  std::size_t region_count() const noexcept { return counts_[0] * counts_[1]; }
  double region_area() const noexcept { return area_; }

  // Per-axis extents; axis 1 is meaningful only for rect2d.
  double lower(std::size_t axis) const { return lo_.at(axis); }
  double upper(std::size_t axis) const { return hi_.at(axis); }
  std::size_t count(std::size_t axis) const { return counts_.at(axis); }
  double cell_width(std::size_t axis) const { return (hi_.at(axis) - lo_.at(axis)) / counts_.at(axis); }

  Location center(std::size_t region) const;
  bool contains(Location p) const noexcept;

  /// Region holding `p`. Interior boundaries go to the higher index; the
  /// domain's upper edge belongs to the last region. Throws OutOfDomain.
  std::size_t locate(Location p) const;

  /// Largest center-to-center distance (the default spline support).
  double diameter() const noexcept;

  friend bool operator==(const RegionGrid&, const RegionGrid&) = default;

 private:
  RegionGrid(GridKind kind, std::array<double, 2> lo, std::array<double, 2> hi,
             std::array<std::size_t, 2> counts);
  std::size_t axis_index(double v, std::size_t axis) const;

  GridKind kind_;
  std::array<double, 2> lo_;
  std::array<double, 2> hi_;
  std::array<std::size_t, 2> counts_;
  double area_;
};

/// Generic constructor: `bounds` is {lo, hi} (1D) or {x_lo, x_hi, y_lo, y_hi}
/// (2D); `counts_per_axis` has one entry per axis.
RegionGrid make_grid(GridKind kind, std::span<const double> bounds,
                     std::span<const std::size_t> counts_per_axis);

/// Number of points falling in each region.
std::vector<std::size_t> bin_events(const RegionGrid& grid, std::span<const Location> points);

}  // namespace spint
