#include "spint/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spint/error.hpp"
#include "spint/parallel.hpp"

namespace spint {

void validate(const ConformalConfig& c, double max_count) {
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (!(c.count_ceiling < std::numeric_limits<double>::infinity()))
    throw InvalidArgument("candidate ceiling Y must be finite");
  if (c.count_ceiling >= 0.0 && c.count_ceiling < max_count)
    throw InvalidArgument("candidate ceiling Y is below the largest observed count");
}

double conformity_score(std::span<const double> residuals, double new_residual) {
  std::size_t below = 1;  // the candidate itself
  for (double e : residuals)
    if (e <= new_residual) ++below;
  return static_cast<double>(below) / static_cast<double>(residuals.size() + 1);
}

std::size_t admission_rank(double alpha, std::size_t n) {
  const double t = (1.0 - alpha) * static_cast<double>(n + 1);
  // Guard against (1 - alpha)(n + 1) landing a rounding error above an integer.
  return static_cast<std::size_t>(std::ceil(t - 1e-9 * std::max(1.0, t)));
}

bool IntensityInterval::admits(double count) const {
  const double c = std::round(count);
  if (c != count) return false;
  return std::binary_search(admitted.begin(), admitted.end(), static_cast<int>(c));
}

int candidate_ceiling(const ConformalConfig& config, const SolverConfig& solver,
                      const CountDataset& data) {
  const double Y = config.count_ceiling >= 0.0 ? config.count_ceiling
                                              : resolve_ceiling(solver, data.max_count());
  return static_cast<int>(std::floor(Y));
}

namespace {

struct Candidate {
  bool admitted = false;
  bool converged = true;
};

struct Prepared {
  SolverConfig solver;
  int ceiling = 0;
  std::size_t threshold = 0;
  std::vector<double> frozen_weights;  // empty unless refit == frozen
};

Prepared prepare(const CountDataset& data, const SpatialBasis& basis, const SolverConfig& solver,
                 const ConformalConfig& config) {
  if (data.empty()) throw InvalidArgument("no data");
  validate(config, data.max_count());
  Prepared p;
  p.ceiling = candidate_ceiling(config, solver, data);
  p.solver = solver;
  p.solver.count_ceiling = std::max<double>(p.ceiling, 1.0);
  validate(p.solver, data.max_count());
  p.threshold = admission_rank(config.alpha, data.size());
  if (config.refit == RefitWeights::frozen) {
    const DesignMatrix design(basis, data.regions);
    p.frozen_weights = penalty_weights(design, p.solver, config.weights);
  }
  return p;
}

Candidate score_candidate(std::size_t region, int candidate, const CountDataset& data,
                          const std::shared_ptr<const SpatialBasis>& basis, const Prepared& p,
                          const ConformalConfig& config) {
  CountDataset augmented = data;
  augmented.add(region, static_cast<double>(candidate));
  const FittedModel model =
      config.refit == RefitWeights::frozen
          ? fit_with_weights(augmented, basis, p.solver, p.frozen_weights)
          : fit(augmented, basis, p.solver, config.weights);

  const auto means = predict_all(*basis, model.theta);
  std::vector<double> residuals(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    residuals[i] = std::fabs(data.counts[i] - means[data.regions[i]]);
  const double own = std::fabs(static_cast<double>(candidate) - means[region]);
  const double pi = conformity_score(residuals, own);
  const double rank = pi * static_cast<double>(data.size() + 1);
  Candidate c;
  c.admitted = std::lround(rank) <= static_cast<long>(p.threshold);
  c.converged = model.diagnostics.converged;
  return c;
}

IntensityInterval assemble(std::size_t region, std::span<const Candidate> cands, double area) {
  IntensityInterval out;
  out.region = region;
  out.refits = cands.size();
  for (std::size_t c = 0; c < cands.size(); ++c) {
    if (cands[c].admitted) out.admitted.push_back(static_cast<int>(c));
    if (!cands[c].converged) ++out.nonconverged;
  }
  if (!out.admitted.empty()) {
    out.lo = out.admitted.front() / area;
    out.hi = out.admitted.back() / area;
    out.contiguous =
        static_cast<std::size_t>(out.admitted.back() - out.admitted.front() + 1) == out.admitted.size();
  }
  return out;
}

}  // namespace

std::vector<IntensityInterval> interval_map(std::span<const std::size_t> regions,
                                            const CountDataset& data,
                                            std::shared_ptr<const SpatialBasis> basis,
                                            const SolverConfig& solver,
                                            const ConformalConfig& config) {
  if (!basis) throw InvalidArgument("interval map needs a basis");
  for (std::size_t r : regions)
    if (r >= basis->size()) throw InvalidArgument("region index out of range");
  const Prepared p = prepare(data, *basis, solver, config);
  const std::size_t per_region = static_cast<std::size_t>(p.ceiling) + 1;
  std::vector<Candidate> slots(regions.size() * per_region);
  parallel_for(slots.size(), config.threads, [&](std::size_t j) {
    slots[j] = score_candidate(regions[j / per_region], static_cast<int>(j % per_region), data,
                               basis, p, config);
  });
  std::vector<IntensityInterval> out;
  out.reserve(regions.size());
  const double area = basis->grid().region_area();
  for (std::size_t i = 0; i < regions.size(); ++i)
    out.push_back(assemble(regions[i], std::span(slots).subspan(i * per_region, per_region), area));
  return out;
}

std::vector<IntensityInterval> interval_map(const CountDataset& data,
                                            std::shared_ptr<const SpatialBasis> basis,
                                            const SolverConfig& solver,
                                            const ConformalConfig& config) {
  if (!basis) throw InvalidArgument("interval map needs a basis");
  std::vector<std::size_t> all(basis->size());
  for (std::size_t r = 0; r < all.size(); ++r) all[r] = r;
  return interval_map(all, data, std::move(basis), solver, config);
}

IntensityInterval region_interval(std::size_t region, const CountDataset& data,
                                  std::shared_ptr<const SpatialBasis> basis,
                                  const SolverConfig& solver, const ConformalConfig& config) {
  const std::size_t regions[] = {region};
  return interval_map(regions, data, std::move(basis), solver, config).front();
}

IntensityInterval intensity_interval(Location x, const CountDataset& data,
                                     std::shared_ptr<const SpatialBasis> basis,
                                     const SolverConfig& solver, const ConformalConfig& config) {
  if (!basis) throw InvalidArgument("interval needs a basis");
  const std::size_t r = basis->grid().locate(x);
  return region_interval(r, data, std::move(basis), solver, config);
}

}  // namespace spint
