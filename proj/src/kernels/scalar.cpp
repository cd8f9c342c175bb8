#include "kernels_impl.hpp"

namespace spint::kernels::detail {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_squares(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double poisson_deviance_terms(const double* h, const double* y, const double* eta,
                              std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += h[i] - y[i] * eta[i];
  return s;
}

void subtract(const double* h, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = h[i] - y[i];
}

}  // namespace

const KernelTable kScalarTable{dot, sum_squares, axpy, poisson_deviance_terms, subtract};

}  // namespace spint::kernels::detail
