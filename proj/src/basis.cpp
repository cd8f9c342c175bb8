#include "spint/basis.hpp"

#include <algorithm>
#include <cmath>

#include "spint/error.hpp"
#include "spint/kernels.hpp"

namespace spint {

double cubic_bspline(double u) noexcept {
  const double a = std::fabs(u);
  if (a >= 2.0) return 0.0;
  // Classical kernel peaks at 2/3; 3/2 rescales the peak to 1.
  if (a < 1.0) return 1.5 * (2.0 / 3.0 - a * a + 0.5 * a * a * a);
  const double t = 2.0 - a;
  return 0.25 * t * t * t;
}

namespace {

double center_distance(const RegionGrid& grid, std::size_t a, std::size_t b) {
  const Location ca = grid.center(a);
  const Location cb = grid.center(b);
  return std::hypot(ca.x - cb.x, ca.y - cb.y);
}

void check_spec(const SplineSpec& spec) {
  if (!(spec.support > 0.0) || !std::isfinite(spec.support))
    throw InvalidArgument("spline support must be positive and finite");
}

}  // namespace

std::vector<double> eval_basis(const RegionGrid& grid, const SplineSpec& spec, std::size_t r) {
  check_spec(spec);
  const std::size_t R = grid.region_count();
  if (r >= R) throw InvalidArgument("region index out of range");
  std::vector<double> phi(R);
  for (std::size_t k = 0; k < R; ++k)
    phi[k] = cubic_bspline(2.0 * center_distance(grid, r, k) / spec.support);
  return phi;
}

SpatialBasis::SpatialBasis(RegionGrid grid, SplineSpec spec)
    : grid_(std::move(grid)), spec_(spec), size_(grid_.region_count()) {
  check_spec(spec_);
  table_.resize(size_ * size_);
  for (std::size_t r = 0; r < size_; ++r) {
    for (std::size_t k = r; k < size_; ++k) {
      const double v = cubic_bspline(2.0 * center_distance(grid_, r, k) / spec_.support);
      table_[r * size_ + k] = v;
      table_[k * size_ + r] = v;
    }
  }
}

DesignMatrix::DesignMatrix(const SpatialBasis& basis, std::span<const std::size_t> regions)
    : samples_(regions.size()),
      components_(basis.size()),
      data_(samples_ * components_),
      regions_(regions.begin(), regions.end()),
      rows_(components_ * components_) {
  for (std::size_t i = 0; i < samples_; ++i) {
    if (regions[i] >= components_) throw InvalidArgument("sample region index out of range");
    const auto row = basis.at(regions[i]);
    for (std::size_t k = 0; k < components_; ++k) data_[k * samples_ + i] = row[k];
  }
  for (std::size_t r = 0; r < components_; ++r) {
    const auto row = basis.at(r);
    std::copy(row.begin(), row.end(), rows_.begin() + r * components_);
  }
}

void DesignMatrix::predictor(std::span<const double> theta, std::span<double> eta) const {
  const std::size_t R = components_;
  std::vector<double> per_region(R);
  for (std::size_t r = 0; r < R; ++r)
    per_region[r] = kernels::dot(std::span(rows_).subspan(r * R, R), theta.first(R));
  for (std::size_t i = 0; i < samples_; ++i) eta[i] = per_region[regions_[i]];
}

void DesignMatrix::transpose_times(std::span<const double> v, std::span<double> out) const {
  const std::size_t R = components_;
  std::vector<double> per_region(R, 0.0);
  for (std::size_t i = 0; i < samples_; ++i) per_region[regions_[i]] += v[i];
  std::fill(out.begin(), out.begin() + R, 0.0);
  for (std::size_t r = 0; r < R; ++r)
    if (per_region[r] != 0.0) kernels::axpy(per_region[r], std::span(rows_).subspan(r * R, R), out.first(R));
}

std::vector<double> regularization_weights(const DesignMatrix& design) {
  if (design.samples() == 0) throw InvalidArgument("regularization weights need n >= 1");
  std::vector<double> w(design.components());
  const double n = static_cast<double>(design.samples());
  for (std::size_t k = 0; k < w.size(); ++k)
    w[k] = std::sqrt(kernels::sum_squares(design.column(k)) / n);
  return w;
}

BasisMatrix make_basis_matrix(const SpatialBasis& basis, std::span<const std::size_t> regions) {
  BasisMatrix m;
  m.phi = DesignMatrix(basis, regions);
  m.weights = regularization_weights(m.phi);
  m.w_min = *std::min_element(m.weights.begin(), m.weights.end());
  return m;
}

}  // namespace spint
