#include <atomic>
#include <cassert>
#include <cstdlib>

#include "kernels_impl.hpp"

namespace spint::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(SPINT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& table_for(Backend b) {
#if defined(SPINT_HAVE_AVX2)
  if (b == Backend::avx2) return detail::kAvx2Table;
#endif
  (void)b;
  return detail::kScalarTable;
}

Backend initial_backend() {
  if (const char* env = std::getenv("SPINT_FORCE_SCALAR"); env && *env && *env != '0')
    return Backend::scalar;
  return detect_backend();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{&table_for(initial_backend())};
  return table;
}

const KernelTable& k() { return *current().load(std::memory_order_relaxed); }

}  // namespace

std::string_view backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

Backend detect_backend() {
  static const bool avx2 = cpu_has_avx2();
  return avx2 ? Backend::avx2 : Backend::scalar;
}

Backend active_backend() {
  return &k() == &detail::kScalarTable ? Backend::scalar : Backend::avx2;
}

bool set_backend(Backend b) {
  if (b == Backend::avx2 && detect_backend() != Backend::avx2) return false;
  current().store(&table_for(b), std::memory_order_relaxed);
  return true;
}

const KernelTable& scalar_table() { return detail::kScalarTable; }

const KernelTable* avx2_table() {
  return detect_backend() == Backend::avx2 ? &table_for(Backend::avx2) : nullptr;
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return k().dot(a.data(), b.data(), a.size());
}

double sum_squares(std::span<const double> a) { return k().sum_squares(a.data(), a.size()); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  k().axpy(alpha, x.data(), y.data(), x.size());
}

double poisson_deviance_terms(std::span<const double> h, std::span<const double> y,
                              std::span<const double> eta) {
  assert(h.size() == y.size() && h.size() == eta.size());
  return k().poisson_deviance_terms(h.data(), y.data(), eta.data(), h.size());
}

void subtract(std::span<const double> h, std::span<const double> y, std::span<double> out) {
  assert(h.size() == y.size() && h.size() == out.size());
  k().subtract(h.data(), y.data(), out.data(), h.size());
}

}  // namespace spint::kernels
