#pragma once

#include "spint/kernels.hpp"

namespace spint::kernels::detail {

extern const KernelTable kScalarTable;
#if defined(SPINT_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif

}  // namespace spint::kernels::detail
