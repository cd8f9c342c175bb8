#include "spint/eval.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "spint/error.hpp"
#include "spint/model.hpp"
#include "spint/parallel.hpp"
#include "spint/random.hpp"

namespace spint {
namespace {

constexpr std::uint64_t kTrainTag = 1;
constexpr std::uint64_t kFreshTag = 2;
constexpr std::uint64_t kTheoremTag = 3;

std::shared_ptr<const SpatialBasis> make_basis(const RegionGrid& grid, double support) {
  const double s = support > 0.0 ? support : grid.diameter();
  return std::make_shared<const SpatialBasis>(grid, SplineSpec{s});
}

}  // namespace

ProcessSetup ProcessSetup::builtin(const std::string& name) {
  if (name == "decaying")
    return {"decaying", IntensitySpec::decaying(), CountFamily::poisson, 100.0};
  return {name, IntensitySpec::named(name), CountFamily::negative_binomial, 100.0};
}

int default_ceiling(const TruthModel& truth) {
  double mu = 0.0;
  for (double m : truth.means) mu = std::max(mu, m);
  if (mu <= 0.0) return 0;
  double mass = 0.0;
  for (int y = 0;; ++y) {
    mass += std::exp(truth_log_pmf(truth, mu, y));
    if (1.0 - mass < 1e-3) return y;
  }
}

CoverageResult coverage_experiment(const ProcessSetup& process, const ExperimentConfig& config,
                                   WeightsMode mode) {
  if (config.repetitions == 0) throw InvalidArgument("repetitions must be >= 1");
  const auto basis = make_basis(config.grid, config.support);
  const TruthModel truth =
      make_truth(process.intensity, config.grid, process.family, process.failures);
  const std::size_t R = config.grid.region_count();
  const auto masked = masked_regions(config.grid, config.masks);
  if (config.draws_per_region == 0) throw InvalidArgument("draws per region must be >= 1");
  const auto observed = observed_regions(config.grid, config.masks);
  std::vector<std::size_t> train_regions;
  for (std::size_t d = 0; d < config.draws_per_region; ++d)
    train_regions.insert(train_regions.end(), observed.begin(), observed.end());
  std::vector<std::size_t> all(R);
  for (std::size_t r = 0; r < R; ++r) all[r] = r;
  const int ceiling =
      config.count_ceiling >= 0.0 ? static_cast<int>(config.count_ceiling) : default_ceiling(truth);

  struct Rep {
    std::vector<double> size;
    std::vector<char> covered;
    std::vector<char> covered_mean;
    std::size_t empty = 0, noncontiguous = 0, refits = 0, nonconverged = 0;
  };
  std::vector<Rep> reps(config.repetitions);
  parallel_for(config.repetitions, config.threads, [&](std::size_t k) {
    CountDataset train;
    const auto y = sample_counts(truth, train_regions, derive_seed(config.seed, kTrainTag, k));
    for (std::size_t i = 0; i < y.size(); ++i) train.add(train_regions[i], y[i]);
    ConformalConfig cc;
    cc.alpha = config.alpha;
    cc.count_ceiling = std::max<double>(ceiling, train.max_count());
    cc.refit = config.refit;
    cc.weights = mode;
    cc.threads = 1;
    const auto intervals = interval_map(all, train, basis, config.solver, cc);
    const auto fresh = sample_counts(truth, all, derive_seed(config.seed, kFreshTag, k));
    Rep& rep = reps[k];
    rep.size.resize(R);
    rep.covered.resize(R);
    rep.covered_mean.resize(R);
    for (std::size_t r = 0; r < R; ++r) {
      const auto& iv = intervals[r];
      rep.size[r] = iv.size();
      rep.covered[r] = iv.admits(fresh[r]);
      const double level = truth.mean(r) / config.grid.region_area();
      rep.covered_mean[r] = !iv.empty() && iv.lo <= level && level <= iv.hi;
      rep.empty += iv.empty();
      rep.noncontiguous += !iv.contiguous;
      rep.refits += iv.refits;
      rep.nonconverged += iv.nonconverged;
    }
  });

  CoverageResult out;
  out.process = process.name;
  out.mode = mode;
  out.repetitions = config.repetitions;
  out.candidate_ceiling = ceiling;
  out.masked = masked;
  out.region_coverage.assign(R, 0.0);
  out.mean_size.assign(R, 0.0);
  std::size_t hits_obs = 0, hits_all = 0, hits_mean = 0;
  for (const Rep& rep : reps) {
    for (std::size_t r = 0; r < R; ++r) {
      out.mean_size[r] += rep.size[r];
      out.region_coverage[r] += rep.covered[r];
      hits_all += rep.covered[r];
      hits_mean += rep.covered_mean[r];
      if (!masked[r]) hits_obs += rep.covered[r];
    }
    out.empty_intervals += rep.empty;
    out.noncontiguous_intervals += rep.noncontiguous;
    out.refits += rep.refits;
    out.nonconverged_refits += rep.nonconverged;
  }
  const double reps_d = static_cast<double>(config.repetitions);
  for (std::size_t r = 0; r < R; ++r) {
    out.mean_size[r] /= reps_d;
    out.region_coverage[r] /= reps_d;
  }
  out.coverage_observed = hits_obs / (reps_d * static_cast<double>(observed.size()));
  out.coverage_all = hits_all / (reps_d * static_cast<double>(R));
  out.coverage_mean = hits_mean / (reps_d * static_cast<double>(R));
  return out;
}

SizeComparison compare_sizes(CoverageResult regularized, CoverageResult unregularized) {
  if (regularized.mean_size.size() != unregularized.mean_size.size())
    throw InvalidArgument("size comparison needs results on the same grid");
  SizeComparison out;
  out.regularized = std::move(regularized);
  out.unregularized = std::move(unregularized);
  const std::size_t R = out.regularized.mean_size.size();
  out.region_ratio.resize(R);
  double sum_m = 0.0, sum_u = 0.0;
  std::size_t n_m = 0, n_u = 0;
  for (std::size_t r = 0; r < R; ++r) {
    const double reg = out.regularized.mean_size[r];
    const double unreg = out.unregularized.mean_size[r];
    out.region_ratio[r] = reg > 0.0 ? unreg / reg : (unreg > 0.0 ? HUGE_VAL : 1.0);
    if (out.regularized.masked[r]) {
      sum_m += out.region_ratio[r];
      ++n_m;
    } else {
      sum_u += out.region_ratio[r];
      ++n_u;
    }
  }
  out.ratio_masked = n_m ? sum_m / n_m : 0.0;
  out.ratio_unmasked = n_u ? sum_u / n_u : 0.0;
  return out;
}

SizeComparison size_comparison(const ProcessSetup& process, const ExperimentConfig& config) {
  return compare_sizes(coverage_experiment(process, config, WeightsMode::standard),
                       coverage_experiment(process, config, WeightsMode::zero));
}

double theorem_probability_raw(std::size_t regions, double w_min, double ceiling, double gamma,
                               double n) {
  const double exponent = w_min * w_min * std::pow(n, 1.0 - 2.0 * gamma) / (2.0 * ceiling * ceiling);
  return 1.0 - 2.0 * static_cast<double>(regions) * std::exp(-exponent);
}

double theorem_probability(std::size_t regions, double w_min, double ceiling, double gamma,
                           double n) {
  return std::max(0.0, theorem_probability_raw(regions, w_min, ceiling, gamma, n));
}

TheoremReport theorem_check(const std::string& name, const TruthModel& truth,
                            const TheoremConfig& config) {
  if (config.repetitions == 0) throw InvalidArgument("repetitions must be >= 1");
  if (!(config.count_ceiling > 0.0)) throw InvalidArgument("theorem check needs Y > 0");
  const auto basis = make_basis(config.grid, config.support);
  const std::size_t R = basis->size();
  if (truth.means.size() != R) throw InvalidArgument("truth does not match the grid");
  TheoremReport report;
  report.process = name;
  SolverConfig solver = config.solver;

  for (std::size_t n : config.sample_sizes) {
    if (n == 0) throw InvalidArgument("sample sizes must be positive");
    std::vector<std::size_t> regions(n);
    for (std::size_t i = 0; i < n; ++i) regions[i] = i % R;

    SolverConfig oracle_cfg = solver;
    oracle_cfg.count_ceiling = 0.0;
    oracle_cfg.max_outer = std::max<std::size_t>(solver.max_outer, 20000);
    const OracleOptimum oracle = oracle_optimum(truth, regions, *basis, oracle_cfg);

    const BasisMatrix bm = make_basis_matrix(*basis, regions);
    const double rho = std::pow(static_cast<double>(n), -solver.gamma);
    double weighted_norm = 0.0;
    for (std::size_t k = 0; k < R; ++k) weighted_norm += bm.weights[k] * std::fabs(oracle.theta[k]);

    TheoremPoint pt;
    pt.n = n;
    pt.oracle_risk = oracle.risk;
    pt.slack = 2.0 * rho * weighted_norm;
    pt.w_min = bm.w_min;
    pt.probability_bound =
        theorem_probability(R, bm.w_min, config.count_ceiling, solver.gamma, static_cast<double>(n));
    pt.vacuous = pt.probability_bound <= 0.0;
    pt.repetitions = config.repetitions;
    pt.oracle_converged = oracle.diagnostics.converged;

    struct Outcome {
      bool satisfied = false;
      bool converged = true;
      double excess = 0.0;
      std::size_t exceed = 0;
    };
    std::vector<Outcome> outcomes(config.repetitions);
    parallel_for(config.repetitions, config.threads, [&](std::size_t k) {
      CountDataset data;
      const auto y = sample_counts(truth, regions, derive_seed(config.seed, kTheoremTag + n, k));
      for (std::size_t i = 0; i < n; ++i) data.add(regions[i], y[i]);
      SolverConfig fit_cfg = solver;
      fit_cfg.count_ceiling = std::max(config.count_ceiling, data.max_count());
      const FittedModel model = fit(data, basis, fit_cfg, WeightsMode::standard);
      const double risk = kl_per_sample(model.theta, truth, regions, *basis);
      Outcome& o = outcomes[k];
      o.excess = risk - oracle.risk;
      o.satisfied = risk <= oracle.risk + pt.slack;
      o.converged = model.diagnostics.converged;
      for (double c : y) o.exceed += c > config.count_ceiling;
    });
    for (const auto& o : outcomes) {
      pt.satisfied += o.satisfied;
      pt.mean_excess_risk += o.excess;
      pt.ceiling_exceedances += o.exceed;
      pt.nonconverged_fits += !o.converged;
    }
    pt.rate = static_cast<double>(pt.satisfied) / static_cast<double>(pt.repetitions);
    pt.mean_excess_risk /= static_cast<double>(pt.repetitions);
    report.points.push_back(pt);
  }
  return report;
}

}  // namespace spint
