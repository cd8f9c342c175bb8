#include "spint/synth.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spint/error.hpp"
#include "spint/random.hpp"

namespace spint {

// ------------------------------------------------------------- intensity

IntensitySpec::IntensitySpec(IntensityKind kind, std::vector<double> params,
                             std::vector<double> values)
    : kind_(kind), params_(std::move(params)), values_(std::move(values)) {}

IntensitySpec IntensitySpec::constant(double c) {
  if (!(c >= 0.0)) throw InvalidArgument("constant intensity must be nonnegative");
  return IntensitySpec(IntensityKind::constant, {c});
}

IntensitySpec IntensitySpec::exp_decay(double amplitude, double scale) {
  if (!(amplitude >= 0.0) || !(scale > 0.0))
    throw InvalidArgument("exp_decay needs amplitude >= 0 and scale > 0");
  return IntensitySpec(IntensityKind::exp_decay, {amplitude, scale});
}

IntensitySpec IntensitySpec::gauss_peak(double mass, double center, double sd) {
  if (!(mass >= 0.0) || !(sd > 0.0)) throw InvalidArgument("gauss_peak needs mass >= 0, sd > 0");
  return IntensitySpec(IntensityKind::gauss_peak, {mass, center, sd});
}

IntensitySpec IntensitySpec::sinusoid(double amplitude, double period, double offset) {
  if (!(period > 0.0) || !(offset >= std::fabs(amplitude)))
    throw InvalidArgument("sinusoid needs period > 0 and offset >= |amplitude|");
  return IntensitySpec(IntensityKind::sinusoid, {amplitude, period, offset});
}

IntensitySpec IntensitySpec::sqrt_growth(double coef) {
  if (!(coef >= 0.0)) throw InvalidArgument("sqrt_growth coefficient must be nonnegative");
  return IntensitySpec(IntensityKind::sqrt_growth, {coef});
}

IntensitySpec IntensitySpec::table(double lo, double hi, std::vector<double> values) {
  if (!(hi > lo) || values.empty()) throw InvalidArgument("table intensity needs lo < hi and values");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("table intensity values must be >= 0");
  return IntensitySpec(IntensityKind::table, {lo, hi}, std::move(values));
}

IntensitySpec IntensitySpec::decaying() { return exp_decay(10.0, 50.0); }
IntensitySpec IntensitySpec::lambda1() { return gauss_peak(500.0, 50.0, 25.0); }
IntensitySpec IntensitySpec::lambda2() { return sinusoid(5.0, 50.0, 5.0); }
IntensitySpec IntensitySpec::lambda3() { return sqrt_growth(3.0 / 8.0); }

IntensitySpec IntensitySpec::named(const std::string& name) {
  if (name == "decaying") return decaying();
  if (name == "lambda1") return lambda1();
  if (name == "lambda2") return lambda2();
  if (name == "lambda3") return lambda3();
  throw InvalidArgument("unknown process '" + name + "'");
}

double IntensitySpec::density(double x) const {
  const auto& p = params_;
  switch (kind_) {
    case IntensityKind::constant:
      return p[0];
    case IntensityKind::exp_decay:
      return p[0] * std::exp(-x / p[1]);
    case IntensityKind::gauss_peak: {
      const double z = (x - p[1]) / p[2];
      return p[0] / (std::sqrt(2.0 * std::numbers::pi) * p[2]) * std::exp(-0.5 * z * z);
    }
    case IntensityKind::sinusoid:
      return p[0] * std::sin(2.0 * std::numbers::pi * x / p[1]) + p[2];
    case IntensityKind::sqrt_growth:
      return x >= 0.0 ? p[0] * std::sqrt(x) : 0.0;
    case IntensityKind::table: {
      if (x < p[0] || x > p[1]) return 0.0;
      const double width = (p[1] - p[0]) / values_.size();
      auto j = static_cast<std::size_t>((x - p[0]) / width);
      return values_[std::min(j, values_.size() - 1)];
    }
  }
  return 0.0;
}

double IntensitySpec::antiderivative(double x) const {
  const auto& p = params_;
  switch (kind_) {
    case IntensityKind::constant:
      return p[0] * x;
    case IntensityKind::exp_decay:
      return -p[0] * p[1] * std::exp(-x / p[1]);
    case IntensityKind::gauss_peak:
      return 0.5 * p[0] * std::erfc(-(x - p[1]) / (p[2] * std::numbers::sqrt2));
    case IntensityKind::sinusoid: {
      const double w = 2.0 * std::numbers::pi / p[1];
      return -p[0] / w * std::cos(w * x) + p[2] * x;
    }
    case IntensityKind::sqrt_growth:
      return x > 0.0 ? p[0] * (2.0 / 3.0) * x * std::sqrt(x) : 0.0;
    case IntensityKind::table: {
      const double width = (p[1] - p[0]) / values_.size();
      const double t = std::clamp(x, p[0], p[1]);
      double acc = 0.0;
      double left = p[0];
      for (double v : values_) {
        const double right = left + width;
        if (t <= right) return acc + v * (t - left);
        acc += v * width;
        left = right;
      }
      return acc;
    }
  }
  return 0.0;
}

void IntensitySpec::check_domain(double lo, double hi) const {
  if (!(hi > lo)) throw InvalidArgument("degenerate sampling domain");
  if (kind_ == IntensityKind::sqrt_growth && lo < 0.0)
    throw InvalidArgument("sqrt_growth intensity is defined for x >= 0 only");
}

std::string to_string(IntensityKind kind) {
  switch (kind) {
    case IntensityKind::constant: return "constant";
    case IntensityKind::exp_decay: return "exp_decay";
    case IntensityKind::gauss_peak: return "gauss_peak";
    case IntensityKind::sinusoid: return "sinusoid";
    case IntensityKind::sqrt_growth: return "sqrt_growth";
    case IntensityKind::table: return "table";
  }
  return "unknown";
}

IntensityKind intensity_kind_from_string(const std::string& s) {
  for (auto k : {IntensityKind::constant, IntensityKind::exp_decay, IntensityKind::gauss_peak,
                 IntensityKind::sinusoid, IntensityKind::sqrt_growth, IntensityKind::table})
    if (to_string(k) == s) return k;
  throw InvalidArgument("unknown intensity kind '" + s + "'");
}

// ------------------------------------------------------------ processes

std::vector<double> region_means(const IntensitySpec& spec, const RegionGrid& grid) {
  if (grid.kind() != GridKind::interval1d)
    throw InvalidArgument("synthetic intensities are defined on 1D grids");
  spec.check_domain(grid.lower(0), grid.upper(0));
  const std::size_t R = grid.region_count();
  const double w = grid.cell_width(0);
  std::vector<double> means(R);
  for (std::size_t r = 0; r < R; ++r) {
    const double a = grid.lower(0) + w * static_cast<double>(r);
    const double b = r + 1 == R ? grid.upper(0) : a + w;
    means[r] = std::max(0.0, spec.integral(a, b));
  }
  return means;
}

TruthModel make_truth(const IntensitySpec& spec, const RegionGrid& grid, CountFamily family,
                      double failures) {
  if (family == CountFamily::negative_binomial && !(failures > 0.0))
    throw InvalidArgument("negative binomial needs failures > 0");
  return TruthModel{family, region_means(spec, grid), failures};
}

std::vector<double> sample_poisson_process(const IntensitySpec& spec, double lo, double hi,
                                           std::uint64_t seed) {
  spec.check_domain(lo, hi);
  const double base = spec.antiderivative(lo);
  const double total = spec.antiderivative(hi) - base;
  RngStream rng(seed, 0);
  const std::int64_t count = rng.poisson(total);
  std::vector<double> points;
  points.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    const double target = rng.uniform_open() * total;
    auto f = [&](double x) { return spec.antiderivative(x) - base - target; };
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, -target, total - target, tol, iters);
    points.push_back(0.5 * (a + b));
  }
  return points;
}

std::vector<double> sample_counts(const TruthModel& truth, std::span<const std::size_t> regions,
                                  std::uint64_t seed) {
  std::vector<double> counts(regions.size());
  std::vector<std::size_t> order(regions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return regions[a] < regions[b]; });
  std::size_t i = 0;
  while (i < order.size()) {
    const std::size_t r = regions[order[i]];
    const double mu = truth.mean(r);
    RngStream rng(seed, static_cast<std::uint64_t>(r) + 1);
    for (; i < order.size() && regions[order[i]] == r; ++i) {
      counts[order[i]] = static_cast<double>(truth.family == CountFamily::poisson
                                                 ? rng.poisson(mu)
                                                 : rng.negative_binomial(mu, truth.failures));
    }
  }
  return counts;
}

// ----------------------------------------------------------------- masks

std::vector<bool> masked_regions(const RegionGrid& grid, std::span<const RegionMask> masks) {
  for (const auto& m : masks) {
    if (!(m.x_hi >= m.x_lo) || m.x_lo < grid.lower(0) || m.x_hi > grid.upper(0))
      throw InvalidArgument("mask x-range must lie within the domain");
    if (grid.kind() == GridKind::rect2d && std::isfinite(m.y_lo) &&
        (!(m.y_hi >= m.y_lo) || m.y_lo < grid.lower(1) || m.y_hi > grid.upper(1)))
      throw InvalidArgument("mask y-range must lie within the domain");
  }
  const std::size_t R = grid.region_count();
  std::vector<bool> masked(R, false);
  std::size_t n_masked = 0;
  for (std::size_t r = 0; r < R; ++r) {
    const Location c = grid.center(r);
    for (const auto& m : masks) {
      const bool in_x = c.x >= m.x_lo && c.x <= m.x_hi;
      const bool in_y = grid.kind() == GridKind::interval1d || (c.y >= m.y_lo && c.y <= m.y_hi);
      if (in_x && in_y) {
        masked[r] = true;
        ++n_masked;
        break;
      }
    }
  }
  if (n_masked == R) throw InvalidArgument("every region is masked");
  return masked;
}

std::vector<std::size_t> observed_regions(const RegionGrid& grid,
                                          std::span<const RegionMask> masks) {
  const auto masked = masked_regions(grid, masks);
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < masked.size(); ++r)
    if (!masked[r]) out.push_back(r);
  return out;
}

CountDataset mask_regions(const CountDataset& data, const RegionGrid& grid,
                          std::span<const RegionMask> masks) {
  const auto masked = masked_regions(grid, masks);
  CountDataset out;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (!masked.at(data.regions[i])) out.add(data.regions[i], data.counts[i]);
  return out;
}

}  // namespace spint
