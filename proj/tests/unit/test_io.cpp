#include <gtest/gtest.h>

#include <sstream>

#include "spint/error.hpp"
#include "spint/io.hpp"
#include "spint/solver.hpp"

using namespace spint;
using namespace spint::io;

namespace {

std::string error_of(const std::string& csv, const RegionGrid& grid) {
  std::istringstream in(csv);
  try {
    read_input_csv(in, grid);
  } catch (const InvalidArgument& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Io, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5, 0.0}) {
    const std::string s = format_double(v);
    EXPECT_EQ(std::stod(s), v) << s;
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Io, GridRoundTrip) {
  for (const auto& g : {RegionGrid::interval(0, 100, 20), RegionGrid::rect(0, 4, -1, 1, 3, 2)}) {
    const auto back = grid_from_json(grid_to_json(g));
    EXPECT_EQ(back.kind(), g.kind());
    EXPECT_EQ(back.region_count(), g.region_count());
    EXPECT_EQ(back.lower(0), g.lower(0));
    EXPECT_EQ(back.upper(0), g.upper(0));
  }
  json bad = grid_to_json(RegionGrid::interval(0, 1, 2));
  bad["kind"] = "hex";
  EXPECT_THROW(grid_from_json(bad), InvalidArgument);
}

TEST(Io, ModelRoundTrip) {
  const auto g = RegionGrid::interval(0, 100, 6);
  const auto basis = std::make_shared<const SpatialBasis>(g, SplineSpec{40.0});
  CountDataset d;
  for (std::size_t r = 0; r < 6; ++r) d.add(r, static_cast<double>(r + 2));
  const auto m = fit(d, basis, SolverConfig{});
  const auto back = model_from_json(json::parse(model_to_json(m).dump()));
  EXPECT_EQ(back.theta, m.theta);
  EXPECT_EQ(back.gamma, m.gamma);
  EXPECT_EQ(back.basis->spline().support, 40.0);
  EXPECT_EQ(back.diagnostics.converged, m.diagnostics.converged);
  EXPECT_EQ(back.diagnostics.outer_iterations, m.diagnostics.outer_iterations);
  json j = model_to_json(m);
  j["theta"] = {1.0, 2.0};
  EXPECT_THROW(model_from_json(j), InvalidArgument);
}

TEST(Io, CountsCsvIsOneBased) {
  const auto g = RegionGrid::interval(0, 100, 4);
  std::istringstream in("region,count\n1,3\n4,0\n\n2, 7\n");
  const auto data = read_input_csv(in, g);
  EXPECT_EQ(data.mode, InputMode::counts);
  ASSERT_EQ(data.counts.size(), 3u);
  EXPECT_EQ(data.counts.regions, (std::vector<std::size_t>{0, 3, 1}));
  EXPECT_EQ(data.counts.counts, (std::vector<double>{3, 0, 7}));

  std::ostringstream out;
  write_counts_csv(out, data.counts);
  EXPECT_EQ(out.str(), "region,count\n1,3\n4,0\n2,7\n");
}

TEST(Io, PointsCsvIsBinned) {
  const auto g = RegionGrid::interval(0, 100, 4);
  std::istringstream in("x\n1.5\n30\n99\n100\n");
  const auto data = read_input_csv(in, g);
  EXPECT_EQ(data.mode, InputMode::points);
  EXPECT_EQ(data.points.size(), 4u);
  EXPECT_EQ(data.counts.counts, (std::vector<double>{1, 1, 0, 2}));

  std::ostringstream out;
  write_points_csv(out, data.points, GridKind::interval1d);
  EXPECT_EQ(out.str(), "x\n1.5\n30\n99\n100\n");
}

TEST(Io, PointsCsv2D) {
  const auto g = RegionGrid::rect(0, 2, 0, 2, 2, 2);
  std::istringstream in("x,y_coord\n0.5,0.5\n1.5,1.5\n1.5,1.7\n");
  const auto data = read_input_csv(in, g);
  EXPECT_EQ(data.counts.counts, (std::vector<double>{1, 0, 0, 2}));
}

TEST(Io, EmptyFileIsNoData) {
  const auto g = RegionGrid::interval(0, 100, 4);
  EXPECT_EQ(error_of("", g), "no data");
  EXPECT_EQ(error_of("\n  \n", g), "no data");
  EXPECT_EQ(error_of("region,count\n", g), "no data");
}

TEST(Io, MalformedRowsCarryLineNumbers) {
  const auto g = RegionGrid::interval(0, 100, 4);
  EXPECT_EQ(error_of("region,count\n1,2\n2,abc\n", g).rfind("line 3:", 0), 0u);
  EXPECT_EQ(error_of("region,count\n1,2,3\n", g).rfind("line 2:", 0), 0u);
  EXPECT_EQ(error_of("region,count\n0,2\n", g).rfind("line 2:", 0), 0u);
  EXPECT_EQ(error_of("region,count\n5,2\n", g).rfind("line 2:", 0), 0u);
  EXPECT_EQ(error_of("region,count\n1,-1\n", g).rfind("line 2:", 0), 0u);
  EXPECT_EQ(error_of("region,count\n1,1.5\n", g).rfind("line 2:", 0), 0u);
  EXPECT_EQ(error_of("x\n50\n101\n", g).rfind("line 3:", 0), 0u);
  EXPECT_EQ(error_of("foo,bar\n1,2\n", g).rfind("line 1:", 0), 0u);
  EXPECT_EQ(error_of("x,y_coord\n1,2\n", g).rfind("line 1:", 0), 0u);
}

TEST(Io, MissingFile) {
  EXPECT_THROW(read_input_csv_file("/nonexistent/input.csv", RegionGrid::interval(0, 1, 1)),
               InvalidArgument);
}

TEST(Io, PredictionsCsv) {
  const auto g = RegionGrid::interval(0, 10, 1);
  const auto basis = std::make_shared<const SpatialBasis>(g, SplineSpec{10.0});
  CountDataset d;
  d.add(0, 4);
  d.add(0, 6);
  SolverConfig cfg;
  cfg.eps_outer = 1e-12;
  const auto m = fit(d, basis, cfg, WeightsMode::zero);
  std::ostringstream out;
  write_predictions_csv(out, m);
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "region,center,mean,intensity");
  double region, center, mean, intensity;
  char c;
  std::istringstream r(row);
  r >> region >> c >> center >> c >> mean >> c >> intensity;
  EXPECT_EQ(region, 1);
  EXPECT_EQ(center, 5);
  EXPECT_NEAR(mean, 5.0, 1e-7);
  EXPECT_NEAR(intensity, mean / 10.0, 1e-15);
}

TEST(Io, IntervalsCsv) {
  const auto g = RegionGrid::interval(0, 10, 2);
  IntensityInterval a;
  a.region = 0;
  a.admitted = {1, 2, 4};
  a.lo = 0.2;
  a.hi = 0.8;
  a.contiguous = false;
  IntensityInterval b;
  b.region = 1;
  std::ostringstream out;
  write_intervals_csv(out, g, {a, b});
  EXPECT_EQ(out.str(),
            "region,center,lo,hi,contiguous,n_candidates_admitted\n"
            "1,2.5,0.2,0.8,false,3\n"
            "2,7.5,nan,nan,true,0\n");
}

TEST(Io, ReportJson) {
  CoverageResult r;
  r.process = "lambda1";
  r.repetitions = 3;
  r.coverage_all = 0.5;
  const auto j = to_json(r);
  EXPECT_EQ(j.at("process"), "lambda1");
  EXPECT_EQ(j.at("repetitions"), 3);
  EXPECT_EQ(j.at("coverage_all"), 0.5);
  EXPECT_TRUE(j.contains("coverage_mean"));
}
