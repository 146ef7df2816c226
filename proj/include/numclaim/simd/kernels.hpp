#pragma once

// Data-parallel inner loops of retrieval scoring and linear-model training.
//
// Every kernel has a scalar reference and (on x86-64) an AVX2 variant picked
// at runtime. Variants are required to be bit-identical: element-wise kernels
// use the same IEEE operation sequence, and the reduction in sparse_dot uses
// a fixed 4-lane accumulation order that the scalar reference mirrors.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace numclaim::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

struct Kernels {
  Isa isa;

  // scores[docs[i]] += (weight * tfs[i]) / (tfs[i] + norms[docs[i]])
  // `docs` must not repeat within one call.
  void (*bm25_accumulate)(const std::uint32_t* docs, const std::uint32_t* tfs, std::size_t n,
                          const double* norms, double weight, double* scores);

  // sum_i dense[idx[i]] * values[i], lane-ordered.
  double (*sparse_dot)(const double* dense, const std::uint32_t* idx, const double* values,
                       std::size_t n);

  // dense[idx[i]] += scale * values[i]; `idx` must not repeat.
  void (*sparse_axpy)(double* dense, const std::uint32_t* idx, const double* values,
                      std::size_t n, double scale);
};

const Kernels& scalar_kernels() noexcept;

bool isa_supported(Isa isa) noexcept;
// Throws std::invalid_argument when the ISA is not compiled in or not supported by the CPU.
const Kernels& kernels_for(Isa isa);

// Best supported ISA, unless QC_SIMD=scalar forces the reference path.
const Kernels& active() noexcept;

std::vector<Isa> supported_isas();

}  // namespace numclaim::simd
