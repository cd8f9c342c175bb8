#pragma once

// Cubic B-spline spatial basis. Component k is centered on region k and
// evaluated at region r through the center distance d(c_r, c_k):
//   phi_k(r) = B(2 d / support),
// where B is the symmetric cubic B-spline on [-2, 2] scaled so B(0) = 1.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "spint/dataset.hpp"
#include "spint/grid.hpp"

namespace spint {

struct SplineSpec {
  double support = 0.0;  // radius where every component reaches zero

  friend bool operator==(const SplineSpec&, const SplineSpec&) = default;
};

/// Peak-normalized cubic B-spline kernel: 1 at u = 0, 0 for |u| >= 2.
double cubic_bspline(double u) noexcept;

/// phi(r) = (phi_0(r), ..., phi_{R-1}(r)).
std::vector<double> eval_basis(const RegionGrid& grid, const SplineSpec& spec, std::size_t r);

/// The basis evaluated at every region, cached as an R x R table.
class SpatialBasis {
 public:
  SpatialBasis(RegionGrid grid, SplineSpec spec);

  const RegionGrid& grid() const noexcept { return grid_; }
  const SplineSpec& spline() const noexcept { return spec_; }
  std::size_t size() const noexcept { return size_; }

  /// phi(r) as a contiguous row.
  std::span<const double> at(std::size_t r) const {
    return {table_.data() + r * size_, size_};
  }
  double value(std::size_t r, std::size_t k) const { return table_[r * size_ + k]; }

 private:
  RegionGrid grid_;
  SplineSpec spec_;
  std::size_t size_;
  std::vector<double> table_;
};

/// The n x R design Phi^T stored by component: column k holds
/// (phi_k(r_1), ..., phi_k(r_n)) contiguously. Products go through the
/// per-region rows, so they cost O(n + R^2).
class DesignMatrix {
 public:
  DesignMatrix() = default;
  DesignMatrix(const SpatialBasis& basis, std::span<const std::size_t> regions);

  std::size_t samples() const noexcept { return samples_; }
  std::size_t components() const noexcept { return components_; }
  std::span<const double> column(std::size_t k) const {
    return {data_.data() + k * samples_, samples_};
  }

  /// eta = Phi^T theta.
  void predictor(std::span<const double> theta, std::span<double> eta) const;
  /// out = Phi v (length R) for a length-n vector v.
  void transpose_times(std::span<const double> v, std::span<double> out) const;

 private:
  std::size_t samples_ = 0;
  std::size_t components_ = 0;
  std::vector<double> data_;
  std::vector<std::size_t> regions_;
  std::vector<double> rows_;  // phi(r) for every region r, row-major
};

/// w_k = sqrt(n^-1 sum_i phi_k(r_i)^2). Throws on an empty design.
std::vector<double> regularization_weights(const DesignMatrix& design);

struct BasisMatrix {
  DesignMatrix phi;
  std::vector<double> weights;
  double w_min = 0.0;  // min_k w_k
};

BasisMatrix make_basis_matrix(const SpatialBasis& basis, std::span<const std::size_t> regions);

}  // namespace spint
