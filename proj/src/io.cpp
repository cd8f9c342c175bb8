#include "spint/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "spint/error.hpp"

namespace spint::io {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json grid_to_json(const RegionGrid& grid) {
  json j;
  if (grid.kind() == GridKind::interval1d) {
    j["kind"] = "interval1d";
    j["bounds"] = {grid.lower(0), grid.upper(0)};
    j["counts_per_axis"] = {grid.count(0)};
  } else {
    j["kind"] = "rect2d";
    j["bounds"] = {grid.lower(0), grid.upper(0), grid.lower(1), grid.upper(1)};
    j["counts_per_axis"] = {grid.count(0), grid.count(1)};
  }
  return j;
}

RegionGrid grid_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const auto bounds = j.at("bounds").get<std::vector<double>>();
  const auto counts = j.at("counts_per_axis").get<std::vector<std::size_t>>();
  if (kind == "interval1d") return make_grid(GridKind::interval1d, bounds, counts);
  if (kind == "rect2d") return make_grid(GridKind::rect2d, bounds, counts);
  throw InvalidArgument("unknown grid kind '" + kind + "'");
}

json model_to_json(const FittedModel& model) {
  json j;
  j["grid"] = grid_to_json(model.grid());
  j["spline"] = {{"support", model.basis->spline().support}};
  j["gamma"] = model.gamma;
  j["theta"] = model.theta;
  const auto& d = model.diagnostics;
  j["diagnostics"] = {{"outer_iterations", d.outer_iterations},
                      {"inner_sweeps", d.inner_sweeps},
                      {"backtracks", d.backtracks},
                      {"converged", d.converged},
                      {"clamped", d.clamped},
                      {"floored_weights", d.floored_weights},
                      {"final_objective", d.final_objective},
                      {"final_step", d.final_step}};
  return j;
}

FittedModel model_from_json(const json& j) {
  FittedModel m;
  m.basis = std::make_shared<const SpatialBasis>(
      grid_from_json(j.at("grid")), SplineSpec{j.at("spline").at("support").get<double>()});
  m.gamma = j.at("gamma").get<double>();
  m.theta = j.at("theta").get<std::vector<double>>();
  if (m.theta.size() != m.basis->size()) throw InvalidArgument("theta length does not match grid");
  if (j.contains("diagnostics")) {
    const auto& d = j["diagnostics"];
    m.diagnostics.outer_iterations = d.value("outer_iterations", std::size_t{0});
    m.diagnostics.inner_sweeps = d.value("inner_sweeps", std::size_t{0});
    m.diagnostics.backtracks = d.value("backtracks", std::size_t{0});
    m.diagnostics.converged = d.value("converged", false);
    m.diagnostics.clamped = d.value("clamped", false);
    m.diagnostics.floored_weights = d.value("floored_weights", std::size_t{0});
    m.diagnostics.final_objective = d.value("final_objective", 0.0);
    m.diagnostics.final_step = d.value("final_step", 0.0);
  }
  return m;
}

json to_json(const CoverageResult& r) {
  json j;
  j["process"] = r.process;
  j["weights"] = r.mode == WeightsMode::standard ? "standard" : "zero";
  j["repetitions"] = r.repetitions;
  j["candidate_ceiling"] = r.candidate_ceiling;
  j["coverage_observed"] = r.coverage_observed;
  j["coverage_all"] = r.coverage_all;
  j["coverage_mean"] = r.coverage_mean;
  j["masked"] = r.masked;
  j["region_coverage"] = r.region_coverage;
  j["mean_size"] = r.mean_size;
  j["empty_intervals"] = r.empty_intervals;
  j["noncontiguous_intervals"] = r.noncontiguous_intervals;
  j["refits"] = r.refits;
  j["nonconverged_refits"] = r.nonconverged_refits;
  return j;
}

json to_json(const SizeComparison& r) {
  return {{"regularized", to_json(r.regularized)},
          {"unregularized", to_json(r.unregularized)},
          {"ratio_masked", r.ratio_masked},
          {"ratio_unmasked", r.ratio_unmasked},
          {"region_ratio", r.region_ratio}};
}

json to_json(const TheoremReport& r) {
  json pts = json::array();
  for (const auto& p : r.points)
    pts.push_back({{"n", p.n},
                   {"oracle_risk", p.oracle_risk},
                   {"slack", p.slack},
                   {"w_min", p.w_min},
                   {"probability_bound", p.probability_bound},
                   {"vacuous", p.vacuous},
                   {"satisfied", p.satisfied},
                   {"repetitions", p.repetitions},
                   {"rate", p.rate},
                   {"mean_excess_risk", p.mean_excess_risk},
                   {"ceiling_exceedances", p.ceiling_exceedances},
                   {"oracle_converged", p.oracle_converged},
                   {"nonconverged_fits", p.nonconverged_fits},
                   {"consistent", p.consistent()}});
  return {{"process", r.process}, {"points", pts}};
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw InvalidArgument("line " + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
    fail(line, "cannot parse number '" + s + "'");
  return v;
}

}  // namespace

InputData read_input_csv(std::istream& in, const RegionGrid& grid) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) {
      header = split(line);
      break;
    }
  }
  if (header.empty()) throw InvalidArgument("no data");

  InputData data;
  const bool points_1d = header == std::vector<std::string>{"x"};
  const bool points_2d = header == std::vector<std::string>{"x", "y_coord"};
  const bool counts = header == std::vector<std::string>{"region", "count"};
  if (!points_1d && !points_2d && !counts)
    fail(lineno, "unrecognized header; expected 'x', 'x,y_coord' or 'region,count'");
  if (points_2d && grid.kind() != GridKind::rect2d) fail(lineno, "2D points need a 2D grid");
  if (points_1d && grid.kind() != GridKind::interval1d) fail(lineno, "1D points need a 1D grid");
  data.mode = counts ? InputMode::counts : InputMode::points;

  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      fail(lineno, "expected " + std::to_string(header.size()) + " columns, found " +
                       std::to_string(cells.size()));
    if (counts) {
      const double r = parse_number(cells[0], lineno);
      const double c = parse_number(cells[1], lineno);
      if (r < 1 || r > static_cast<double>(grid.region_count()) || r != std::floor(r))
        fail(lineno, "region must be an integer in 1.." + std::to_string(grid.region_count()));
      if (c < 0 || c != std::floor(c)) fail(lineno, "count must be a nonnegative integer");
      data.counts.add(static_cast<std::size_t>(r) - 1, c);
    } else {
      Location p;
      p.x = parse_number(cells[0], lineno);
      if (points_2d) p.y = parse_number(cells[1], lineno);
      if (!grid.contains(p)) fail(lineno, "point outside the grid domain");
      data.points.push_back(p);
    }
  }
  if (data.mode == InputMode::points) {
    data.counts = dataset_from_bins(bin_events(grid, data.points));
  } else if (data.counts.empty()) {
    throw InvalidArgument("no data");
  }
  return data;
}

InputData read_input_csv_file(const std::string& path, const RegionGrid& grid) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open input file '" + path + "'");
  return read_input_csv(in, grid);
}

void write_points_csv(std::ostream& out, const std::vector<Location>& points, GridKind kind) {
  out << (kind == GridKind::interval1d ? "x\n" : "x,y_coord\n");
  for (const auto& p : points) {
    out << format_double(p.x);
    if (kind == GridKind::rect2d) out << ',' << format_double(p.y);
    out << '\n';
  }
}

void write_counts_csv(std::ostream& out, const CountDataset& data) {
  out << "region,count\n";
  for (std::size_t i = 0; i < data.size(); ++i)
    out << data.regions[i] + 1 << ',' << format_double(data.counts[i]) << '\n';
}

namespace {

void write_center(std::ostream& out, const RegionGrid& grid, std::size_t r) {
  const Location c = grid.center(r);
  out << format_double(c.x);
  if (grid.kind() == GridKind::rect2d) out << ',' << format_double(c.y);
}

const char* center_header(const RegionGrid& grid) {
  return grid.kind() == GridKind::interval1d ? "center" : "center_x,center_y";
}

}  // namespace

void write_predictions_csv(std::ostream& out, const FittedModel& model) {
  const RegionGrid& grid = model.grid();
  out << "region," << center_header(grid) << ",mean,intensity\n";
  for (std::size_t r = 0; r < grid.region_count(); ++r) {
    const double mean = predict_mean(model, r);
    out << r + 1 << ',';
    write_center(out, grid, r);
    out << ',' << format_double(mean) << ',' << format_double(mean / grid.region_area()) << '\n';
  }
}

void write_intervals_csv(std::ostream& out, const RegionGrid& grid,
                         const std::vector<IntensityInterval>& intervals) {
  out << "region," << center_header(grid) << ",lo,hi,contiguous,n_candidates_admitted\n";
  for (const auto& iv : intervals) {
    out << iv.region + 1 << ',';
    write_center(out, grid, iv.region);
    if (iv.empty())
      out << ",nan,nan,";
    else
      out << ',' << format_double(iv.lo) << ',' << format_double(iv.hi) << ',';
    out << (iv.contiguous ? "true" : "false") << ',' << iv.admitted.size() << '\n';
  }
}

}  // namespace spint::io
