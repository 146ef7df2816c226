#include "numclaim/simd/kernels.hpp"

namespace numclaim::simd {

namespace {

void bm25_accumulate_scalar(const std::uint32_t* docs, const std::uint32_t* tfs, std::size_t n,
                            const double* norms, double weight, double* scores) {
  for (std::size_t i = 0; i < n; ++i) {
    const double tf = static_cast<double>(tfs[i]);
    const double num = weight * tf;
    const double den = tf + norms[docs[i]];
    scores[docs[i]] += num / den;
  }
}

double sparse_dot_scalar(const double* dense, const std::uint32_t* idx, const double* values,
                         std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) lane[l] += dense[idx[i + l]] * values[i + l];
  }
  for (std::size_t l = 0; i < n; ++i, ++l) lane[l] += dense[idx[i]] * values[i];
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

void sparse_axpy_scalar(double* dense, const std::uint32_t* idx, const double* values,
                        std::size_t n, double scale) {
  for (std::size_t i = 0; i < n; ++i) dense[idx[i]] += scale * values[i];
}

constexpr Kernels kScalar{Isa::Scalar, &bm25_accumulate_scalar, &sparse_dot_scalar,
                          &sparse_axpy_scalar};

}  // namespace

const Kernels& scalar_kernels() noexcept { return kScalar; }

}  // namespace numclaim::simd
