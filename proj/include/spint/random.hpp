#pragma once

// Seeded random streams. Every stream is a std::mt19937_64 (whose output
// sequence is fixed by the C++ standard) seeded through std::seed_seq from
// the 32-bit halves of (seed, stream id). Samplers use Boost.Random
// distributions, whose algorithms are fixed by the library rather than the
// platform, so a (seed, stream) pair reproduces the same draws everywhere.

#include <cstdint>
#include <random>

namespace spint {

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::mt19937_64& engine() noexcept { return engine_; }

  /// Uniform on the open interval (0, 1).
  double uniform_open();
  /// Poisson draw; 0 when mean <= 0.
  std::int64_t poisson(double mean);
  double gamma(double shape, double scale);
  /// Negative binomial with the given mean and number of failures, drawn
  /// as a gamma-Poisson mixture (variance mean + mean^2 / failures).
  std::int64_t negative_binomial(double mean, double failures);

 private:
  std::mt19937_64 engine_;
};

/// Deterministic child seed for (master, tag, index), via the splitmix64
/// finalizer. Used to give each repetition of an experiment its own seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index) noexcept;

}  // namespace spint
