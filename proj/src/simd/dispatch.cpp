#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_internal.hpp"

namespace numclaim::simd {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "?";
}

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(NUMCLAIM_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const Kernels& kernels_for(Isa isa) {
  if (!isa_supported(isa))
    throw std::invalid_argument("SIMD variant not available: " + std::string(to_string(isa)));
#if defined(NUMCLAIM_HAVE_AVX2)
  if (isa == Isa::Avx2) return detail::avx2_kernels();
#endif
  return scalar_kernels();
}

const Kernels& active() noexcept {
  static const Kernels& chosen = []() -> const Kernels& {
    if (const char* env = std::getenv("QC_SIMD"); env && std::string(env) == "scalar")
      return scalar_kernels();
    if (isa_supported(Isa::Avx2)) return kernels_for(Isa::Avx2);
    return scalar_kernels();
  }();
  return chosen;
}

std::vector<Isa> supported_isas() {
  std::vector<Isa> out{Isa::Scalar};
  if (isa_supported(Isa::Avx2)) out.push_back(Isa::Avx2);
  return out;
}

}  // namespace numclaim::simd
