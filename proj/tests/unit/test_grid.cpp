#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "spint/error.hpp"
#include "spint/grid.hpp"

using namespace spint;

TEST(Grid, IntervalShapes) {
  const auto g = RegionGrid::interval(0, 100, 20);
  EXPECT_EQ(g.region_count(), 20u);
  EXPECT_DOUBLE_EQ(g.region_area(), 5.0);
  const auto one = RegionGrid::interval(0, 1, 1);
  EXPECT_EQ(one.region_count(), 1u);
  EXPECT_DOUBLE_EQ(one.region_area(), 1.0);
  const auto fifty = RegionGrid::interval(0, 200, 50);
  EXPECT_EQ(fifty.region_count(), 50u);
  EXPECT_DOUBLE_EQ(fifty.region_area(), 4.0);
}

TEST(Grid, RejectsBadBounds) {
  EXPECT_THROW(RegionGrid::interval(1, 1, 3), InvalidArgument);
  EXPECT_THROW(RegionGrid::interval(2, 1, 3), InvalidArgument);
  EXPECT_THROW(RegionGrid::interval(0, 1, 0), InvalidArgument);
  EXPECT_THROW(RegionGrid::rect(0, 1, 0, 1, 2, 0), InvalidArgument);
  const std::vector<double> b{0, 1, 0};
  const std::vector<std::size_t> c{2};
  EXPECT_THROW(make_grid(GridKind::interval1d, b, c), InvalidArgument);
}

TEST(Grid, LocateBoundaryConvention) {
  const auto g = RegionGrid::interval(0, 100, 20);
  EXPECT_EQ(g.locate({0.0}), 0u);
  EXPECT_EQ(g.locate({100.0}), 19u);
  EXPECT_EQ(g.locate({12.5}), 2u);
  EXPECT_EQ(g.locate({5.0}), 1u);  // interior boundary goes up
  EXPECT_EQ(g.locate({4.999999}), 0u);
  EXPECT_THROW(g.locate({-0.1}), OutOfDomain);
  EXPECT_THROW(g.locate({100.1}), OutOfDomain);
}

TEST(Grid, Rect2dIndexing) {
  const auto g = RegionGrid::rect(0, 4, 0, 2, 4, 2);
  EXPECT_EQ(g.region_count(), 8u);
  EXPECT_DOUBLE_EQ(g.region_area(), 1.0);
  EXPECT_EQ(g.locate({0.5, 0.5}), 0u);
  EXPECT_EQ(g.locate({3.5, 0.5}), 3u);
  EXPECT_EQ(g.locate({0.5, 1.5}), 4u);
  EXPECT_EQ(g.locate({4.0, 2.0}), 7u);
  const auto c = g.center(5);
  EXPECT_DOUBLE_EQ(c.x, 1.5);
  EXPECT_DOUBLE_EQ(c.y, 1.5);
  EXPECT_THROW(g.locate({1.0, 2.5}), OutOfDomain);
}

TEST(Grid, Centers) {
  const auto g = RegionGrid::interval(0, 100, 20);
  EXPECT_DOUBLE_EQ(g.center(0).x, 2.5);
  EXPECT_DOUBLE_EQ(g.center(19).x, 97.5);
  EXPECT_DOUBLE_EQ(g.diameter(), 95.0);
  EXPECT_THROW(g.center(20), InvalidArgument);
}

TEST(Grid, BinEvents) {
  const auto g4 = RegionGrid::interval(0, 4, 4);
  EXPECT_EQ(bin_events(g4, {}), (std::vector<std::size_t>{0, 0, 0, 0}));
  std::vector<Location> centers;
  for (std::size_t r = 0; r < 4; ++r) centers.push_back(g4.center(r));
  EXPECT_EQ(bin_events(g4, centers), (std::vector<std::size_t>{1, 1, 1, 1}));
  const std::vector<Location> three{{1.2}, {1.5}, {1.9}};
  EXPECT_EQ(bin_events(g4, three), (std::vector<std::size_t>{0, 3, 0, 0}));
}

TEST(Grid, BinEventsReportsOffendingIndex) {
  const auto g = RegionGrid::interval(0, 4, 4);
  const std::vector<Location> pts{{1.0}, {2.0}, {7.0}};
  try {
    bin_events(g, pts);
    FAIL() << "expected OutOfDomain";
  } catch (const OutOfDomain& e) {
    EXPECT_EQ(e.index(), 2u);
  }
}

TEST(Grid, LocateIsTotalOnRandomPoints) {
  std::mt19937_64 gen(3);
  const auto g1 = RegionGrid::interval(-3, 17, 13);
  const auto g2 = RegionGrid::rect(0, 10, -5, 5, 7, 3);
  std::uniform_real_distribution<double> ux(-3, 17), vx(0, 10), vy(-5, 5);
  for (int i = 0; i < 10000; ++i) {
    const Location p{ux(gen)};
    const auto r = g1.locate(p);
    ASSERT_LT(r, g1.region_count());
    const double c = g1.center(r).x, h = g1.cell_width(0) / 2;
    ASSERT_LE(c - h - 1e-12, p.x);
    ASSERT_LE(p.x, c + h + 1e-12);
    const Location q{vx(gen), vy(gen)};
    ASSERT_LT(g2.locate(q), g2.region_count());
  }
}
