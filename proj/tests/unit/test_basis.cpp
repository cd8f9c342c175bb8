#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "spint/basis.hpp"
#include "spint/error.hpp"

using namespace spint;

TEST(Basis, KernelPiecewiseValues) {
  EXPECT_DOUBLE_EQ(cubic_bspline(0.0), 1.0);
  EXPECT_DOUBLE_EQ(cubic_bspline(1.0), 0.25);
  EXPECT_DOUBLE_EQ(cubic_bspline(-1.0), 0.25);
  EXPECT_DOUBLE_EQ(cubic_bspline(2.0), 0.0);
  EXPECT_DOUBLE_EQ(cubic_bspline(3.5), 0.0);
  // standard cubic B-spline (4 - 6u^2 + 3|u|^3)/6 near 0, divided by 2/3
  EXPECT_NEAR(cubic_bspline(0.5), (4 - 6 * 0.25 + 3 * 0.125) / 6 / (2.0 / 3.0), 1e-15);
  EXPECT_NEAR(cubic_bspline(1.5), std::pow(0.5, 3) / 6 / (2.0 / 3.0), 1e-15);
  for (double u : {0.999999999, 1.000000001, 1.999999999})
    EXPECT_NEAR(cubic_bspline(u), cubic_bspline(std::nearbyint(u)), 1e-8);
}

TEST(Basis, PeakAndCompactSupport) {
  const auto g = RegionGrid::interval(0, 100, 20);
  const SpatialBasis b(g, SplineSpec{10.0});
  for (std::size_t k = 0; k < 20; ++k) EXPECT_DOUBLE_EQ(b.value(k, k), 1.0);
  EXPECT_NEAR(b.value(3, 4), 0.25, 1e-15);  // d = 5, u = 1
  EXPECT_DOUBLE_EQ(b.value(3, 5), 0.0);     // d = 10 = support
  EXPECT_DOUBLE_EQ(b.value(0, 19), 0.0);
  const auto row = eval_basis(g, SplineSpec{10.0}, 3);
  ASSERT_EQ(row.size(), 20u);
  for (std::size_t k = 0; k < 20; ++k) EXPECT_DOUBLE_EQ(row[k], b.value(3, k));
}

TEST(Basis, DefaultSupportCoversGrid) {
  const auto g = RegionGrid::interval(0, 100, 20);
  const SpatialBasis b(g, SplineSpec{g.diameter()});
  for (std::size_t r = 0; r < 20; ++r)
    for (std::size_t k = 0; k < 20; ++k) {
      if (r == 0 && k == 19) continue;
      if (r == 19 && k == 0) continue;
      EXPECT_GT(b.value(r, k), 0.0);
    }
}

TEST(Basis, SymmetricOnEqualAreaGrids) {
  const auto g = RegionGrid::rect(0, 3, 0, 2, 6, 4);
  const SpatialBasis b(g, SplineSpec{1.7});
  for (std::size_t r = 0; r < b.size(); ++r)
    for (std::size_t k = 0; k < b.size(); ++k) EXPECT_DOUBLE_EQ(b.value(r, k), b.value(k, r));
}

TEST(Basis, RejectsNonPositiveSupport) {
  const auto g = RegionGrid::interval(0, 1, 2);
  EXPECT_THROW(SpatialBasis(g, SplineSpec{0.0}), InvalidArgument);
  EXPECT_THROW(SpatialBasis(g, SplineSpec{-1.0}), InvalidArgument);
}

TEST(Basis, DesignMatrixProducts) {
  const auto g = RegionGrid::interval(0, 4, 4);
  const SpatialBasis b(g, SplineSpec{3.0});
  const std::vector<std::size_t> regions{0, 2, 2, 3};
  const DesignMatrix D(b, regions);
  ASSERT_EQ(D.samples(), 4u);
  ASSERT_EQ(D.components(), 4u);
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(D.column(k)[i], b.value(regions[i], k));
  const std::vector<double> theta{0.1, -0.2, 0.3, 0.4};
  std::vector<double> eta(4);
  D.predictor(theta, eta);
  for (std::size_t i = 0; i < 4; ++i) {
    double e = 0;
    for (std::size_t k = 0; k < 4; ++k) e += b.value(regions[i], k) * theta[k];
    EXPECT_NEAR(eta[i], e, 1e-15);
  }
  const std::vector<double> v{1, 2, 3, 4};
  std::vector<double> out(4);
  D.transpose_times(v, out);
  for (std::size_t k = 0; k < 4; ++k) {
    double e = 0;
    for (std::size_t i = 0; i < 4; ++i) e += b.value(regions[i], k) * v[i];
    EXPECT_NEAR(out[k], e, 1e-14);
  }
}

TEST(Basis, RegularizationWeights) {
  const auto g = RegionGrid::interval(0, 4, 4);
  const SpatialBasis b(g, SplineSpec{1.0});  // phi_k(r) = [r == k]
  const std::vector<std::size_t> all_in_1{1, 1, 1};
  auto w = regularization_weights(DesignMatrix(b, all_in_1));
  EXPECT_DOUBLE_EQ(w[1], 1.0);
  EXPECT_DOUBLE_EQ(w[0], 0.0);
  EXPECT_DOUBLE_EQ(w[3], 0.0);

  // neighbours of the middle component sit at u = 1
  const auto g3 = RegionGrid::interval(0, 3, 3);
  const SpatialBasis b3(g3, SplineSpec{2.0});
  const std::vector<std::size_t> ends{0, 2};
  const auto bm = make_basis_matrix(b3, ends);
  EXPECT_DOUBLE_EQ(b3.value(0, 1), 0.25);
  EXPECT_NEAR(bm.weights[1], std::sqrt((0.25 * 0.25 + 0.25 * 0.25) / 2), 1e-15);
  EXPECT_DOUBLE_EQ(bm.w_min, *std::min_element(bm.weights.begin(), bm.weights.end()));

  EXPECT_THROW(regularization_weights(DesignMatrix(b, std::vector<std::size_t>{})),
               InvalidArgument);
}

TEST(Basis, HalfValuedWeight) {
  // phi values (0.5, 0.5) over n = 2; bisect for B(u) = 0.5
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cubic_bspline(mid) > 0.5 ? lo : hi) = mid;
  }
  const double u = 0.5 * (lo + hi);
  const auto g = RegionGrid::interval(0, 3, 3);
  const SpatialBasis b(g, SplineSpec{2.0 / u});  // d = 1 maps to u
  const auto w = regularization_weights(DesignMatrix(b, std::vector<std::size_t>{0, 2}));
  EXPECT_NEAR(w[1], 0.5, 1e-12);
}
