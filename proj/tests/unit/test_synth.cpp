#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numeric>
#include <vector>

#include "spint/error.hpp"
#include "spint/random.hpp"
#include "spint/synth.hpp"

using namespace spint;

namespace {

double quad(const IntensitySpec& s, double a, double b) {
  auto f = [&](double x) { return s.density(x); };
  if (s.kind() == IntensityKind::sqrt_growth) {
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, a, b, 1e-14);
  }
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14, &err);
}

double ks_statistic(std::vector<double> xs, const IntensitySpec& s, double lo, double hi) {
  std::sort(xs.begin(), xs.end());
  const double total = s.integral(lo, hi);
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = s.integral(lo, xs[i]) / total;
    d = std::max({d, F - i / n, (i + 1) / n - F});
  }
  return d;
}

struct Moments {
  double mean, var, se_mean, se_var;
};

Moments moments(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double m2 = 0, m4 = 0;
  for (double x : v) {
    const double d = x - m;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n - 1;
  m4 /= n;
  return {m, m2, std::sqrt(m2 / n), std::sqrt((m4 - m2 * m2) / n)};
}

}  // namespace

TEST(Synth, RegionMeanExamples) {
  const auto g20 = RegionGrid::interval(0, 100, 20);
  EXPECT_NEAR(region_means(IntensitySpec::decaying(), g20)[0], 500 * (1 - std::exp(-0.1)), 1e-12);
  EXPECT_NEAR(region_means(IntensitySpec::decaying(), g20)[0], 47.581, 1e-3);
  const auto g25 = RegionGrid::interval(0, 100, 25);
  EXPECT_NEAR(region_means(IntensitySpec::lambda3(), g25)[0], 2.0, 1e-12);
  for (double m : region_means(IntensitySpec::constant(1.5), g20)) EXPECT_NEAR(m, 7.5, 1e-12);
}

TEST(Synth, RegionMeansMatchQuadrature) {
  const auto g = RegionGrid::interval(0, 100, 20);
  for (const char* name : {"decaying", "lambda1", "lambda2", "lambda3"}) {
    const auto s = IntensitySpec::named(name);
    const auto m = region_means(s, g);
    for (std::size_t r = 0; r < 20; ++r) {
      const double q = quad(s, g.center(r).x - 2.5, g.center(r).x + 2.5);
      EXPECT_NEAR(m[r], q, 1e-10) << name << " region " << r;
    }
  }
  const auto t = IntensitySpec::table(0, 100, {1, 2, 3, 4});
  const auto mt = region_means(t, g);
  EXPECT_NEAR(mt[0], 5.0, 1e-12);
  EXPECT_NEAR(mt[19], 20.0, 1e-12);
}

TEST(Synth, NamedLookup) {
  EXPECT_EQ(IntensitySpec::named("decaying").kind(), IntensityKind::exp_decay);
  EXPECT_EQ(IntensitySpec::named("lambda2").kind(), IntensityKind::sinusoid);
  EXPECT_THROW(IntensitySpec::named("nope"), InvalidArgument);
  EXPECT_EQ(intensity_kind_from_string(to_string(IntensityKind::gauss_peak)),
            IntensityKind::gauss_peak);
  EXPECT_NEAR(IntensitySpec::lambda1().density(50), 500 / std::sqrt(2 * M_PI * 625), 1e-12);
  EXPECT_NEAR(IntensitySpec::lambda2().density(12.5), 10.0, 1e-12);
}

TEST(Synth, DomainChecks) {
  EXPECT_THROW(IntensitySpec::sinusoid(5, 50, 4), InvalidArgument);
  EXPECT_THROW(region_means(IntensitySpec::lambda3(), RegionGrid::interval(-10, 10, 4)),
               InvalidArgument);
  EXPECT_THROW(region_means(IntensitySpec::constant(1), RegionGrid::rect(0, 1, 0, 1, 2, 2)),
               InvalidArgument);
}

TEST(Synth, ZeroIntensityHasNoEvents) {
  EXPECT_TRUE(sample_poisson_process(IntensitySpec::constant(0), 0, 100, 5).empty());
}

TEST(Synth, InversionSamplerPassesKs) {
  const std::vector<IntensitySpec> specs{
      IntensitySpec::exp_decay(230, 50), IntensitySpec::gauss_peak(10500, 50, 25),
      IntensitySpec::sinusoid(50, 50, 100), IntensitySpec::sqrt_growth(15)};
  for (const auto& s : specs) {
    const auto xs = sample_poisson_process(s, 0, 100, 2024);
    ASSERT_GT(xs.size(), 9000u);
    const double crit = 1.628 / std::sqrt(static_cast<double>(xs.size()));
    EXPECT_LT(ks_statistic(xs, s, 0, 100), crit) << to_string(s.kind());
    for (double x : xs) {
      ASSERT_GE(x, 0.0);
      ASSERT_LE(x, 100.0);
    }
  }
}

TEST(Synth, ConstantIntensityBinMeans) {
  const auto g = RegionGrid::interval(0, 10, 5);
  const auto s = IntensitySpec::constant(0.5);
  std::vector<std::vector<double>> per(5);
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    std::vector<Location> pts;
    for (double x : sample_poisson_process(s, 0, 10, seed)) pts.push_back({x});
    const auto c = bin_events(g, pts);
    for (std::size_t r = 0; r < 5; ++r) per[r].push_back(static_cast<double>(c[r]));
  }
  for (std::size_t r = 0; r < 5; ++r) {
    const auto m = moments(per[r]);
    EXPECT_NEAR(m.mean, 1.0, 3 * m.se_mean) << r;
  }
}

TEST(Synth, DecayingProcessBinMeansAndTotal) {
  const auto g = RegionGrid::interval(0, 100, 20);
  const auto s = IntensitySpec::decaying();
  const auto means = region_means(s, g);
  std::vector<std::vector<double>> per(20);
  std::vector<double> totals;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    std::vector<Location> pts;
    for (double x : sample_poisson_process(s, 0, 100, seed)) pts.push_back({x});
    totals.push_back(static_cast<double>(pts.size()));
    const auto c = bin_events(g, pts);
    for (std::size_t r = 0; r < 20; ++r) per[r].push_back(static_cast<double>(c[r]));
  }
  for (std::size_t r = 0; r < 20; ++r) {
    const auto m = moments(per[r]);
    EXPECT_NEAR(m.mean, means[r], 3 * m.se_mean) << r;
  }
  const auto t = moments(totals);
  EXPECT_NEAR(t.mean, 500 * (1 - std::exp(-2.0)), 3 * t.se_mean);
}

TEST(Synth, CountMoments) {
  TruthModel p{CountFamily::poisson, {4.0, 0.0}, 100};
  TruthModel nb{CountFamily::negative_binomial, {4.0, 0.0}, 100};
  const std::vector<std::size_t> r(100000, 0);
  const auto mp = moments(sample_counts(p, r, 1));
  EXPECT_NEAR(mp.mean, 4.0, 3 * mp.se_mean);
  const auto mn = moments(sample_counts(nb, r, 2));
  EXPECT_NEAR(mn.mean, 4.0, 3 * mn.se_mean);
  EXPECT_NEAR(mn.var, 4.16, 3 * mn.se_var);
  const std::vector<std::size_t> zero(50, 1);
  for (double y : sample_counts(nb, zero, 3)) EXPECT_EQ(y, 0.0);
  for (double y : sample_counts(p, zero, 3)) EXPECT_EQ(y, 0.0);
}

TEST(Synth, Reproducible) {
  const auto g = RegionGrid::interval(0, 100, 20);
  const auto truth = make_truth(IntensitySpec::lambda1(), g, CountFamily::negative_binomial);
  std::vector<std::size_t> all(20);
  std::iota(all.begin(), all.end(), 0);
  const auto a = sample_counts(truth, all, 42);
  EXPECT_EQ(a, sample_counts(truth, all, 42));
  EXPECT_NE(a, sample_counts(truth, all, 43));
  // regions draw from their own streams
  const std::vector<std::size_t> only{7};
  EXPECT_EQ(sample_counts(truth, only, 42)[0], a[7]);
  const auto x = sample_poisson_process(IntensitySpec::decaying(), 0, 100, 9);
  EXPECT_EQ(x, sample_poisson_process(IntensitySpec::decaying(), 0, 100, 9));
  RngStream s1(5, 1), s2(5, 1), s3(5, 2);
  const auto v1 = s1.engine()();
  EXPECT_EQ(v1, s2.engine()());
  EXPECT_NE(v1, s3.engine()());
  EXPECT_NE(derive_seed(1, 1, 0), derive_seed(1, 1, 1));
  EXPECT_NE(derive_seed(1, 1, 0), derive_seed(1, 2, 0));
}

TEST(Synth, Masks) {
  const auto g = RegionGrid::interval(0, 100, 20);
  const std::vector<RegionMask> none;
  EXPECT_EQ(observed_regions(g, none).size(), 20u);
  const std::vector<RegionMask> m{RegionMask{30, 80}};
  const auto masked = masked_regions(g, m);
  for (std::size_t r = 0; r < 20; ++r) EXPECT_EQ(masked[r], r >= 6 && r <= 15) << r;
  const std::vector<RegionMask> m2{RegionMask{50, 90}};
  EXPECT_EQ(observed_regions(g, m2).size(), 12u);
  const std::vector<RegionMask> full{RegionMask{0, 100}};
  EXPECT_THROW(masked_regions(g, full), InvalidArgument);
  const std::vector<RegionMask> outside{RegionMask{-5, 10}};
  EXPECT_THROW(masked_regions(g, outside), InvalidArgument);

  CountDataset d;
  for (std::size_t r = 0; r < 20; ++r) d.add(r, static_cast<double>(r));
  const auto kept = mask_regions(d, g, m);
  EXPECT_EQ(kept.size(), 10u);
  for (std::size_t r : kept.regions) EXPECT_FALSE(masked[r]);
  EXPECT_EQ(mask_regions(d, g, none).regions, d.regions);

  const auto g2 = RegionGrid::rect(0, 2, 0, 2, 2, 2);
  const std::vector<RegionMask> box{RegionMask{0, 1, 0, 1}};
  const auto m2d = masked_regions(g2, box);
  EXPECT_TRUE(m2d[0]);
  EXPECT_FALSE(m2d[1] || m2d[2] || m2d[3]);
}
