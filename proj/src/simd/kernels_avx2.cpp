// Compiled with -mavx2 only; dispatch guarantees the CPU supports it.
#include <immintrin.h>

#include "kernels_internal.hpp"

namespace numclaim::simd::detail {

namespace {

inline __m128i load_idx4(const std::uint32_t* p) {
  return _mm_loadu_si128(reinterpret_cast<const __m128i*>(p));
}

void bm25_accumulate_avx2(const std::uint32_t* docs, const std::uint32_t* tfs, std::size_t n,
                          const double* norms, double weight, double* scores) {
  const __m256d w = _mm256_set1_pd(weight);
  alignas(32) double contrib[4];
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i d = load_idx4(docs + i);
    const __m256d tf = _mm256_cvtepi32_pd(load_idx4(tfs + i));
    const __m256d norm = _mm256_i32gather_pd(norms, d, 8);
    const __m256d num = _mm256_mul_pd(w, tf);
    const __m256d den = _mm256_add_pd(tf, norm);
    _mm256_store_pd(contrib, _mm256_div_pd(num, den));
    // no scatter in AVX2
    scores[docs[i]] += contrib[0];
    scores[docs[i + 1]] += contrib[1];
    scores[docs[i + 2]] += contrib[2];
    scores[docs[i + 3]] += contrib[3];
  }
  for (; i < n; ++i) {
    const double tf = static_cast<double>(tfs[i]);
    scores[docs[i]] += (weight * tf) / (tf + norms[docs[i]]);
  }
}

double sparse_dot_avx2(const double* dense, const std::uint32_t* idx, const double* values,
                       std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_i32gather_pd(dense, load_idx4(idx + i), 8);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(g, _mm256_loadu_pd(values + i)));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (std::size_t l = 0; i < n; ++i, ++l) lane[l] += dense[idx[i]] * values[i];
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

void sparse_axpy_avx2(double* dense, const std::uint32_t* idx, const double* values,
                      std::size_t n, double scale) {
  const __m256d s = _mm256_set1_pd(scale);
  alignas(32) double out[4];
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i ix = load_idx4(idx + i);
    const __m256d g = _mm256_i32gather_pd(dense, ix, 8);
    _mm256_store_pd(out, _mm256_add_pd(g, _mm256_mul_pd(s, _mm256_loadu_pd(values + i))));
    dense[idx[i]] = out[0];
    dense[idx[i + 1]] = out[1];
    dense[idx[i + 2]] = out[2];
    dense[idx[i + 3]] = out[3];
  }
  for (; i < n; ++i) dense[idx[i]] += scale * values[i];
}

constexpr Kernels kAvx2{Isa::Avx2, &bm25_accumulate_avx2, &sparse_dot_avx2, &sparse_axpy_avx2};

}  // namespace

const Kernels& avx2_kernels() noexcept { return kAvx2; }

}  // namespace numclaim::simd::detail
