#include "spint/random.hpp"

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

namespace spint {

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

double RngStream::uniform_open() {
  for (;;) {
    // 53 random bits mapped to [0, 1); zero is rejected.
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

std::int64_t RngStream::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  boost::random::poisson_distribution<std::int64_t, double> d(mean);
  return d(engine_);
}

double RngStream::gamma(double shape, double scale) {
  boost::random::gamma_distribution<double> d(shape, scale);
  return d(engine_);
}

std::int64_t RngStream::negative_binomial(double mean, double failures) {
  if (!(mean > 0.0)) return 0;
  return poisson(gamma(failures, mean / failures));
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index) noexcept {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(master) ^ tag) ^ index);
}

}  // namespace spint
