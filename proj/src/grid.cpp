#include "spint/grid.hpp"

#include <cmath>
#include <sstream>

#include "spint/error.hpp"

namespace spint {
namespace {

void check_axis(double lo, double hi, std::size_t n, const char* name) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
    std::ostringstream os;
    os << "degenerate " << name << " bounds [" << lo << ", " << hi << "]";
    throw InvalidArgument(os.str());
  }
  if (n == 0) throw InvalidArgument(std::string("zero region count along ") + name);
}

}  // namespace

RegionGrid::RegionGrid(GridKind kind, std::array<double, 2> lo, std::array<double, 2> hi,
                       std::array<std::size_t, 2> counts)
    : kind_(kind), lo_(lo), hi_(hi), counts_(counts) {
  area_ = (hi_[0] - lo_[0]) / counts_[0];
  if (kind_ == GridKind::rect2d) area_ *= (hi_[1] - lo_[1]) / counts_[1];
}

RegionGrid RegionGrid::interval(double lo, double hi, std::size_t count) {
  check_axis(lo, hi, count, "x");
  return RegionGrid(GridKind::interval1d, {lo, 0.0}, {hi, 1.0}, {count, 1});
}

RegionGrid RegionGrid::rect(double x_lo, double x_hi, double y_lo, double y_hi,
                            std::size_t nx, std::size_t ny) {
  check_axis(x_lo, x_hi, nx, "x");
  check_axis(y_lo, y_hi, ny, "y");
  return RegionGrid(GridKind::rect2d, {x_lo, y_lo}, {x_hi, y_hi}, {nx, ny});
}

Location RegionGrid::center(std::size_t region) const {
  if (region >= region_count()) throw InvalidArgument("region index out of range");
  const std::size_t ix = region % counts_[0];
  const std::size_t iy = region / counts_[0];
  Location c;
  c.x = lo_[0] + (static_cast<double>(ix) + 0.5) * cell_width(0);
  if (kind_ == GridKind::rect2d) c.y = lo_[1] + (static_cast<double>(iy) + 0.5) * cell_width(1);
  return c;
}

bool RegionGrid::contains(Location p) const noexcept {
  if (!(p.x >= lo_[0] && p.x <= hi_[0])) return false;
  if (kind_ == GridKind::rect2d && !(p.y >= lo_[1] && p.y <= hi_[1])) return false;
  return true;
}

std::size_t RegionGrid::axis_index(double v, std::size_t axis) const {
  const double t = (v - lo_[axis]) / cell_width(axis);
  auto idx = static_cast<std::size_t>(std::floor(t));
  return idx >= counts_[axis] ? counts_[axis] - 1 : idx;
}

std::size_t RegionGrid::locate(Location p) const {
  if (!contains(p)) {
    std::ostringstream os;
    os << "location (" << p.x;
    if (kind_ == GridKind::rect2d) os << ", " << p.y;
    os << ") outside the grid domain";
    throw OutOfDomain(os.str());
  }
  std::size_t r = axis_index(p.x, 0);
  if (kind_ == GridKind::rect2d) r += axis_index(p.y, 1) * counts_[0];
  return r;
}

double RegionGrid::diameter() const noexcept {
  const double dx = (hi_[0] - lo_[0]) - cell_width(0);
  if (kind_ == GridKind::interval1d) return dx;
  const double dy = (hi_[1] - lo_[1]) - (hi_[1] - lo_[1]) / counts_[1];
  return std::hypot(dx, dy);
}

RegionGrid make_grid(GridKind kind, std::span<const double> bounds,
                     std::span<const std::size_t> counts_per_axis) {
  if (kind == GridKind::interval1d) {
    if (bounds.size() != 2 || counts_per_axis.size() != 1)
      throw InvalidArgument("1D grid needs bounds {lo, hi} and one region count");
    return RegionGrid::interval(bounds[0], bounds[1], counts_per_axis[0]);
  }
  if (bounds.size() != 4 || counts_per_axis.size() != 2)
    throw InvalidArgument("2D grid needs bounds {x_lo, x_hi, y_lo, y_hi} and two region counts");
  return RegionGrid::rect(bounds[0], bounds[1], bounds[2], bounds[3], counts_per_axis[0],
                          counts_per_axis[1]);
}

std::vector<std::size_t> bin_events(const RegionGrid& grid, std::span<const Location> points) {
  std::vector<std::size_t> counts(grid.region_count(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!grid.contains(points[i])) {
      std::ostringstream os;
      os << "point " << i << " at (" << points[i].x;
      if (grid.kind() == GridKind::rect2d) os << ", " << points[i].y;
      os << ") lies outside the grid domain";
      throw OutOfDomain(os.str(), i);
    }
    ++counts[grid.locate(points[i])];
  }
  return counts;
}

}  // namespace spint
