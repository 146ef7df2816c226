#pragma once

#include "numclaim/simd/kernels.hpp"

namespace numclaim::simd::detail {

#if defined(NUMCLAIM_HAVE_AVX2)
const Kernels& avx2_kernels() noexcept;
#endif

}  // namespace numclaim::simd::detail
