#pragma once

// JSON documents for grids, models and experiment reports, plus the CSV
// formats read and written by the command-line tool. CSV region columns
// are 1-based.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "spint/conformal.hpp"
#include "spint/eval.hpp"
#include "spint/grid.hpp"
#include "spint/model.hpp"

namespace spint::io {

using nlohmann::json;

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

json grid_to_json(const RegionGrid& grid);
RegionGrid grid_from_json(const json& j);

json model_to_json(const FittedModel& model);
FittedModel model_from_json(const json& j);

json to_json(const CoverageResult& r);
json to_json(const SizeComparison& r);
json to_json(const TheoremReport& r);

enum class InputMode { points, counts };

struct InputData {
  InputMode mode = InputMode::counts;
  std::vector<Location> points;  // points mode
  CountDataset counts;           // counts mode, or the binned points
};

/// Reads `x` / `x,y_coord` point files or `region,count` count files
/// (detected from the header). Points are binned onto the grid into one
/// observation per region. Errors carry the 1-based line number.
InputData read_input_csv(std::istream& in, const RegionGrid& grid);
InputData read_input_csv_file(const std::string& path, const RegionGrid& grid);

void write_points_csv(std::ostream& out, const std::vector<Location>& points, GridKind kind);
void write_counts_csv(std::ostream& out, const CountDataset& data);
void write_predictions_csv(std::ostream& out, const FittedModel& model);
void write_intervals_csv(std::ostream& out, const RegionGrid& grid,
                         const std::vector<IntensityInterval>& intervals);

}  // namespace spint::io
