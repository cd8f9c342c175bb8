// spint: spatial intensity intervals from event or count data.
//
//   spint fit       --input data.csv --out DIR
//   spint interval  --input data.csv --out DIR
//   spint synth     --process lambda1 --mode counts --out DIR
//   spint reproduce table1|fig3c|theorem --out DIR
//
// Every run writes DIR/config.json; `spint <cmd> --config DIR/config.json`
// repeats it. Exit codes: 0 success, 1 finished with flagged fits or
// intervals, 2 bad arguments or input.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spint/conformal.hpp"
#include "spint/error.hpp"
#include "spint/eval.hpp"
#include "spint/io.hpp"
#include "spint/solver.hpp"
#include "spint/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spint;

namespace {

struct RunConfig {
  std::string command;
  std::string experiment;  // reproduce only
  std::string grid = "0,100,20";
  double support = 0.0;
  double gamma = 0.499;
  double alpha = 0.2;
  double ymax = -1.0;
  std::uint64_t seed = 1;
  std::vector<std::string> masks;
  std::size_t reps = 50;
  std::size_t draws = 1;
  std::string out = "spint_out";
  std::string input;
  std::string process = "lambda1";
  std::string mode = "counts";
  unsigned threads = 0;
  std::string weights = "standard";
  std::string refit = "recompute";
  double eps_outer = 1e-6;
  std::size_t max_outer = 500;
  std::vector<std::size_t> sizes{100, 1000, 10000};
};

json to_json(const RunConfig& c) {
  return {{"command", c.command},     {"experiment", c.experiment}, {"grid", c.grid},
          {"support", c.support},     {"gamma", c.gamma},           {"alpha", c.alpha},
          {"ymax", c.ymax},           {"seed", c.seed},             {"mask", c.masks},
          {"reps", c.reps},           {"draws", c.draws},           {"out", c.out},
          {"input", c.input},         {"process", c.process},       {"mode", c.mode},
          {"threads", c.threads},     {"weights", c.weights},       {"refit", c.refit},
          {"eps_outer", c.eps_outer}, {"max_outer", c.max_outer},   {"sizes", c.sizes}};
}

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

void merge(const json& j, RunConfig& c) {
  take(j, "experiment", c.experiment);
  take(j, "grid", c.grid);
  take(j, "support", c.support);
  take(j, "gamma", c.gamma);
  take(j, "alpha", c.alpha);
  take(j, "ymax", c.ymax);
  take(j, "seed", c.seed);
  take(j, "mask", c.masks);
  take(j, "reps", c.reps);
  take(j, "draws", c.draws);
  take(j, "out", c.out);
  take(j, "input", c.input);
  take(j, "process", c.process);
  take(j, "mode", c.mode);
  take(j, "threads", c.threads);
  take(j, "weights", c.weights);
  take(j, "refit", c.refit);
  take(j, "eps_outer", c.eps_outer);
  take(j, "max_outer", c.max_outer);
  take(j, "sizes", c.sizes);
}

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> numbers(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw UsageError(std::string("cannot parse ") + what + " '" + s + "'");
    }
  }
  return out;
}

RegionGrid parse_grid(const std::string& s) {
  const auto v = numbers(s, "--grid");
  const auto count = [&](double x) {
    if (x < 1 || x != std::floor(x)) throw UsageError("--grid region counts must be positive integers");
    return static_cast<std::size_t>(x);
  };
  if (v.size() == 3) return RegionGrid::interval(v[0], v[1], count(v[2]));
  if (v.size() == 6) return RegionGrid::rect(v[0], v[1], v[2], v[3], count(v[4]), count(v[5]));
  throw UsageError("--grid takes lo,hi,count or x_lo,x_hi,y_lo,y_hi,nx,ny");
}

std::vector<RegionMask> parse_masks(const std::vector<std::string>& specs) {
  std::vector<RegionMask> out;
  for (const auto& s : specs) {
    const auto v = numbers(s, "--mask");
    if (v.size() == 2)
      out.push_back(RegionMask{v[0], v[1]});
    else if (v.size() == 4)
      out.push_back(RegionMask{v[0], v[1], v[2], v[3]});
    else
      throw UsageError("--mask takes x_lo,x_hi or x_lo,x_hi,y_lo,y_hi");
  }
  return out;
}

WeightsMode parse_weights(const std::string& s) {
  if (s == "standard") return WeightsMode::standard;
  if (s == "zero") return WeightsMode::zero;
  throw UsageError("--weights must be standard or zero");
}

RefitWeights parse_refit(const std::string& s) {
  if (s == "recompute") return RefitWeights::recompute;
  if (s == "frozen") return RefitWeights::frozen;
  throw UsageError("--refit must be recompute or frozen");
}

// A built-in name, or constant:C for lambda = C with Poisson counts.
ProcessSetup parse_process(const std::string& s) {
  if (s.rfind("constant:", 0) == 0) {
    const auto v = numbers(s.substr(9), "--process");
    if (v.size() != 1 || !(v[0] >= 0.0)) throw UsageError("constant:C needs C >= 0");
    return {s, IntensitySpec::constant(v[0]), CountFamily::poisson, 100.0};
  }
  return ProcessSetup::builtin(s);
}

SolverConfig solver_config(const RunConfig& c) {
  SolverConfig s;
  s.gamma = c.gamma;
  s.eps_outer = c.eps_outer;
  s.max_outer = c.max_outer;
  return s;
}

std::shared_ptr<const SpatialBasis> make_basis(const RegionGrid& grid, double support) {
  double s = support > 0.0 ? support : grid.diameter();
  if (!(s > 0.0)) s = grid.upper(0) - grid.lower(0);  // single region
  return std::make_shared<const SpatialBasis>(grid, SplineSpec{s});
}

std::ofstream open_out(const RunConfig& c, const std::string& name) {
  fs::create_directories(c.out);
  std::ofstream f(fs::path(c.out) / name);
  if (!f) throw UsageError("cannot write " + (fs::path(c.out) / name).string());
  return f;
}

void write_json(const RunConfig& c, const std::string& name, const json& j) {
  open_out(c, name) << j.dump(2) << '\n';
}

CountDataset load_counts(const RunConfig& c, const RegionGrid& grid) {
  if (c.input.empty()) throw UsageError("--input is required");
  auto data = io::read_input_csv_file(c.input, grid).counts;
  const auto masks = parse_masks(c.masks);
  if (!masks.empty()) data = mask_regions(data, grid, masks);
  if (data.empty()) throw InvalidArgument("no data");
  return data;
}

int cmd_fit(const RunConfig& c) {
  const auto grid = parse_grid(c.grid);
  const auto data = load_counts(c, grid);
  SolverConfig s = solver_config(c);
  if (c.ymax >= 0.0) s.count_ceiling = c.ymax;
  validate(s, data.max_count());
  const auto model = fit(data, make_basis(grid, c.support), s, parse_weights(c.weights));
  write_json(c, "model.json", io::model_to_json(model));
  auto pred = open_out(c, "predictions.csv");
  io::write_predictions_csv(pred, model);
  if (!model.diagnostics.converged) {
    std::cerr << "warning: solver stopped after " << model.diagnostics.outer_iterations
              << " outer iterations without converging\n";
    return 1;
  }
  return 0;
}

int cmd_interval(const RunConfig& c) {
  const auto grid = parse_grid(c.grid);
  const auto data = load_counts(c, grid);
  ConformalConfig cc;
  cc.alpha = c.alpha;
  cc.count_ceiling = c.ymax;
  cc.weights = parse_weights(c.weights);
  cc.refit = parse_refit(c.refit);
  cc.threads = c.threads;
  const auto intervals = interval_map(data, make_basis(grid, c.support), solver_config(c), cc);
  auto f = open_out(c, "intervals.csv");
  io::write_intervals_csv(f, grid, intervals);
  std::size_t empty = 0, nonconverged = 0;
  for (const auto& iv : intervals) {
    empty += iv.empty();
    nonconverged += iv.nonconverged;
  }
  if (empty || nonconverged) {
    std::cerr << "warning: " << empty << " empty intervals, " << nonconverged
              << " candidate fits did not converge\n";
    return 1;
  }
  return 0;
}

int cmd_synth(const RunConfig& c) {
  const auto grid = parse_grid(c.grid);
  if (grid.kind() != GridKind::interval1d) throw UsageError("synth supports 1D grids only");
  const auto process = parse_process(c.process);
  if (c.mode == "points") {
    std::vector<Location> pts;
    for (double x : sample_poisson_process(process.intensity, grid.lower(0), grid.upper(0), c.seed))
      pts.push_back({x});
    auto f = open_out(c, "points.csv");
    io::write_points_csv(f, pts, grid.kind());
  } else if (c.mode == "counts") {
    if (c.draws == 0) throw UsageError("--draws must be >= 1");
    const auto truth = make_truth(process.intensity, grid, process.family, process.failures);
    const auto observed = observed_regions(grid, parse_masks(c.masks));
    std::vector<std::size_t> regions;
    for (std::size_t d = 0; d < c.draws; ++d)
      regions.insert(regions.end(), observed.begin(), observed.end());
    const auto y = sample_counts(truth, regions, c.seed);
    CountDataset data;
    for (std::size_t i = 0; i < regions.size(); ++i) data.add(regions[i], y[i]);
    auto f = open_out(c, "counts.csv");
    io::write_counts_csv(f, data);
  } else {
    throw UsageError("--mode must be points or counts");
  }
  return 0;
}

ExperimentConfig experiment_config(const RunConfig& c) {
  ExperimentConfig e;
  e.grid = parse_grid(c.grid);
  e.support = c.support;
  e.masks = parse_masks(c.masks);
  e.alpha = c.alpha;
  e.count_ceiling = c.ymax;
  e.repetitions = c.reps;
  e.draws_per_region = c.draws;
  e.seed = c.seed;
  e.solver = solver_config(c);
  e.refit = parse_refit(c.refit);
  e.threads = c.threads;
  return e;
}

int cmd_reproduce(const RunConfig& c) {
  bool flagged = false;
  if (c.experiment == "table1") {
    const auto cfg = experiment_config(c);
    json j = json::array();
    auto csv = open_out(c, "coverage.csv");
    csv << "process,coverage\n";
    for (const char* name : {"lambda1", "lambda2", "lambda3"}) {
      const auto r = coverage_experiment(ProcessSetup::builtin(name), cfg, parse_weights(c.weights));
      j.push_back(io::to_json(r));
      csv << name << ',' << io::format_double(r.coverage_observed) << '\n';
      std::printf("%s coverage %.4f\n", name, r.coverage_observed);
      flagged = flagged || r.nonconverged_refits > 0 || r.empty_intervals > 0;
    }
    write_json(c, "report.json", {{"experiment", "table1"}, {"results", j}});
  } else if (c.experiment == "fig3c") {
    auto cfg = experiment_config(c);
    if (cfg.masks.empty()) cfg.masks = {RegionMask{50, 90}};
    const auto s = size_comparison(parse_process(c.process), cfg);
    auto csv = open_out(c, "sizes.csv");
    csv << "region,mean_size_reg,mean_size_unreg\n";
    for (std::size_t r = 0; r < s.region_ratio.size(); ++r)
      csv << r + 1 << ',' << io::format_double(s.regularized.mean_size[r]) << ','
          << io::format_double(s.unregularized.mean_size[r]) << '\n';
    write_json(c, "report.json", {{"experiment", "fig3c"}, {"results", io::to_json(s)}});
    std::printf("%s masked ratio %.3f unmasked ratio %.3f\n", c.process.c_str(), s.ratio_masked,
                s.ratio_unmasked);
    for (const auto* r : {&s.regularized, &s.unregularized})
      flagged = flagged || r->nonconverged_refits > 0 || r->empty_intervals > 0;
  } else if (c.experiment == "theorem") {
    TheoremConfig t;
    t.grid = parse_grid(c.grid);
    t.support = c.support;
    t.count_ceiling = c.ymax;
    t.sample_sizes = c.sizes;
    t.repetitions = c.reps;
    t.seed = c.seed;
    t.solver = solver_config(c);
    t.threads = c.threads;
    const auto process = parse_process(c.process);
    const auto truth = make_truth(process.intensity, t.grid, process.family, process.failures);
    const auto rep = theorem_check(c.process, truth, t);
    auto csv = open_out(c, "theorem.csv");
    csv << "n,rate,probability_bound,vacuous,oracle_risk,slack\n";
    for (const auto& p : rep.points) {
      csv << p.n << ',' << io::format_double(p.rate) << ',' << io::format_double(p.probability_bound)
          << ',' << (p.vacuous ? "true" : "false") << ',' << io::format_double(p.oracle_risk) << ','
          << io::format_double(p.slack) << '\n';
      std::printf("n=%zu rate %.3f bound %.4f%s\n", p.n, p.rate, p.probability_bound,
                  p.vacuous ? " (vacuous)" : "");
      flagged = flagged || !p.oracle_converged || p.nonconverged_fits > 0;
    }
    write_json(c, "report.json", {{"experiment", "theorem"}, {"results", io::to_json(rep)}});
  } else {
    throw UsageError("reproduce needs one of table1, fig3c, theorem");
  }
  return flagged ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformal intensity intervals for spatial point and count data"};
  app.require_subcommand(1);
  RunConfig flags;
  std::string config_path;
  std::map<CLI::App*, std::vector<std::pair<std::string, CLI::Option*>>> given;

  const auto common = [&](CLI::App* sub) {
    auto& opts = given[sub];
    const auto add = [&](const char* name, auto& dst, const char* help) {
      opts.emplace_back(name + 2, sub->add_option(name, dst, help)->capture_default_str());
    };
    sub->add_option("--config", config_path, "JSON run configuration; flags override it");
    add("--grid", flags.grid, "lo,hi,count (1D) or x_lo,x_hi,y_lo,y_hi,nx,ny (2D)");
    add("--support", flags.support, "spline support radius; 0 = grid diameter");
    add("--gamma", flags.gamma, "penalty exponent, rho = n^-gamma");
    add("--seed", flags.seed, "master seed");
    add("--mask", flags.masks, "withheld box x_lo,x_hi[,y_lo,y_hi]; repeatable");
    add("--out", flags.out, "output directory");
    add("--threads", flags.threads, "worker threads; 0 = all cores");
    add("--eps-outer", flags.eps_outer, "outer stopping tolerance on ||step||");
    add("--max-outer", flags.max_outer, "outer iteration limit");
    return sub;
  };
  const auto with = [&](CLI::App* sub, const char* name, auto& dst, const char* help) {
    given[sub].emplace_back(name + 2, sub->add_option(name, dst, help)->capture_default_str());
  };

  auto* fit_cmd = common(app.add_subcommand("fit", "fit the penalized Poisson model"));
  with(fit_cmd, "--input", flags.input, "points (x or x,y_coord) or counts (region,count) CSV");
  with(fit_cmd, "--weights", flags.weights, "penalty weights: standard or zero");
  with(fit_cmd, "--ymax", flags.ymax, "majorizer curvature Y; negative = 2 * max count");

  auto* iv_cmd = common(app.add_subcommand("interval", "conformal intensity interval per region"));
  with(iv_cmd, "--input", flags.input, "points or counts CSV");
  with(iv_cmd, "--alpha", flags.alpha, "miscoverage level in (0, 1)");
  with(iv_cmd, "--ymax", flags.ymax, "candidate ceiling Y; negative = 2 * max count");
  with(iv_cmd, "--weights", flags.weights, "penalty weights: standard or zero");
  with(iv_cmd, "--refit", flags.refit, "weights per candidate: recompute or frozen");

  auto* synth_cmd = common(app.add_subcommand("synth", "sample a synthetic process"));
  with(synth_cmd, "--process", flags.process, "decaying, lambda1, lambda2, lambda3 or constant:C");
  with(synth_cmd, "--mode", flags.mode, "points or counts");
  with(synth_cmd, "--draws", flags.draws, "count draws per unmasked region (counts mode)");

  auto* rep_cmd = common(app.add_subcommand("reproduce", "run a Monte-Carlo experiment"));
  rep_cmd->add_option("experiment", flags.experiment, "table1, fig3c or theorem");
  with(rep_cmd, "--process", flags.process, "process for fig3c and theorem");
  with(rep_cmd, "--alpha", flags.alpha, "miscoverage level");
  with(rep_cmd, "--ymax", flags.ymax, "candidate ceiling (table1, fig3c; negative = truth-based) or Y (theorem)");
  with(rep_cmd, "--reps", flags.reps, "Monte-Carlo repetitions");
  with(rep_cmd, "--draws", flags.draws, "training draws per unmasked region");
  with(rep_cmd, "--weights", flags.weights, "table1 penalty weights: standard or zero");
  with(rep_cmd, "--refit", flags.refit, "weights per candidate: recompute or frozen");
  with(rep_cmd, "--sizes", flags.sizes, "theorem sample sizes");
  given[rep_cmd].back().second->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  RunConfig c;
  c.command = sub->get_name();
  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw UsageError("cannot open config '" + config_path + "'");
      const json j = json::parse(f);
      if (j.contains("command") && j.at("command").get<std::string>() != c.command)
        throw UsageError("config was written by '" + j.at("command").get<std::string>() + "'");
      merge(j, c);
    }
    if (c.command == "reproduce" && !flags.experiment.empty()) c.experiment = flags.experiment;
    json overrides = to_json(flags);
    for (const auto& [key, opt] : given[sub]) {
      const std::string k = key == "eps-outer" ? "eps_outer" : key == "max-outer" ? "max_outer" : key;
      if (opt->count() > 0) {
        json one;
        one[k] = overrides.at(k);
        merge(one, c);
      }
    }
    if (c.command == "reproduce" && c.experiment == "theorem" && c.ymax <= 0.0)
      throw UsageError("reproduce theorem needs --ymax > 0");

    fs::create_directories(c.out);
    write_json(c, "config.json", to_json(c));
    if (c.command == "fit") return cmd_fit(c);
    if (c.command == "interval") return cmd_interval(c);
    if (c.command == "synth") return cmd_synth(c);
    return cmd_reproduce(c);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const OutOfDomain& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: bad config: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
