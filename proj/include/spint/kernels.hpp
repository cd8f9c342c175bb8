#pragma once

// Dense vector kernels used by the solver inner loops. Every kernel has a
// scalar reference implementation; an AVX2/FMA variant is selected at
// runtime when the CPU supports it. Results of the two backends agree to
// rounding (summation order differs), and are bit-stable within a backend.

#include <cstddef>
#include <span>
#include <string_view>

namespace spint::kernels {

enum class Backend { scalar, avx2 };

std::string_view backend_name(Backend b);

/// Best backend supported by the running CPU and this build.
Backend detect_backend();

/// Backend currently used by the dispatching entry points below.
/// Defaults to detect_backend(), or scalar when SPINT_FORCE_SCALAR is set.
Backend active_backend();

/// Returns false (and leaves the backend unchanged) if `b` is unavailable.
bool set_backend(Backend b);

double dot(std::span<const double> a, std::span<const double> b);
double sum_squares(std::span<const double> a);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
// sum_i (h_i - y_i * eta_i)
double poisson_deviance_terms(std::span<const double> h, std::span<const double> y,
                              std::span<const double> eta);
// out_i = h_i - y_i
void subtract(std::span<const double> h, std::span<const double> y, std::span<double> out);

// Direct access to one backend, for equivalence tests.
struct KernelTable {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum_squares)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  double (*poisson_deviance_terms)(const double*, const double*, const double*, std::size_t);
  void (*subtract)(const double*, const double*, double*, std::size_t);
};

const KernelTable& scalar_table();
/// nullptr when the AVX2 variant is not compiled in or not supported.
const KernelTable* avx2_table();

}  // namespace spint::kernels
