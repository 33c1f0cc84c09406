#include "ybl/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace ybl::simd {
namespace {

inline __mmask8 tail_mask(std::size_t rem) { return static_cast<__mmask8>((1u << rem) - 1u); }

double dot_avx512(const double* a, const double* b, std::size_t len) {
  __m512d s0 = _mm512_setzero_pd(), s1 = _mm512_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= len; i += 16) {
    s0 = _mm512_fmadd_pd(_mm512_loadu_pd(a + i), _mm512_loadu_pd(b + i), s0);
    s1 = _mm512_fmadd_pd(_mm512_loadu_pd(a + i + 8), _mm512_loadu_pd(b + i + 8), s1);
  }
  for (; i + 8 <= len; i += 8) s0 = _mm512_fmadd_pd(_mm512_loadu_pd(a + i), _mm512_loadu_pd(b + i), s0);
  if (i < len) {
    const __mmask8 m = tail_mask(len - i);
    s1 = _mm512_fmadd_pd(_mm512_maskz_loadu_pd(m, a + i), _mm512_maskz_loadu_pd(m, b + i), s1);
  }
  return _mm512_reduce_add_pd(_mm512_add_pd(s0, s1));
}

void row_dots_avx512(const double* a, const double* b, std::size_t rows, std::size_t cols, double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_avx512(a + r * cols, b + r * cols, cols);
}

void row_wsq_avx512(const double* a, const double* w, std::size_t rows, std::size_t cols, double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a + r * cols;
    __m512d s = _mm512_setzero_pd();
    std::size_t c = 0;
    for (; c + 8 <= cols; c += 8) {
      const __m512d x = _mm512_loadu_pd(row + c);
      s = _mm512_fmadd_pd(_mm512_mul_pd(_mm512_loadu_pd(w + c), x), x, s);
    }
    if (c < cols) {
      const __mmask8 m = tail_mask(cols - c);
      const __m512d x = _mm512_maskz_loadu_pd(m, row + c);
      s = _mm512_fmadd_pd(_mm512_mul_pd(_mm512_maskz_loadu_pd(m, w + c), x), x, s);
    }
    out[r] = _mm512_reduce_add_pd(s);
  }
}

void normalize_rows_avx512(double* a, std::size_t rows, std::size_t cols, double* norms) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = a + r * cols;
    const double nrm = std::sqrt(dot_avx512(row, row, cols));
    norms[r] = nrm;
    const __m512d vi = _mm512_set1_pd(1.0 / nrm);
    std::size_t c = 0;
    for (; c + 8 <= cols; c += 8) _mm512_storeu_pd(row + c, _mm512_mul_pd(_mm512_loadu_pd(row + c), vi));
    if (c < cols) {
      const __mmask8 m = tail_mask(cols - c);
      _mm512_mask_storeu_pd(row + c, m, _mm512_mul_pd(_mm512_maskz_loadu_pd(m, row + c), vi));
    }
  }
}

template <int R>
inline void block_16(std::size_t k, const double* a, std::size_t lda, const double* b, std::size_t ldb, double* c,
                     std::size_t ldc) {
  __m512d acc[R][2];
  for (int r = 0; r < R; ++r) acc[r][0] = acc[r][1] = _mm512_setzero_pd();
  for (std::size_t p = 0; p < k; ++p) {
    const __m512d b0 = _mm512_loadu_pd(b + p * ldb);
    const __m512d b1 = _mm512_loadu_pd(b + p * ldb + 8);
    for (int r = 0; r < R; ++r) {
      const __m512d av = _mm512_set1_pd(a[r * lda + p]);
      acc[r][0] = _mm512_fmadd_pd(av, b0, acc[r][0]);
      acc[r][1] = _mm512_fmadd_pd(av, b1, acc[r][1]);
    }
  }
  for (int r = 0; r < R; ++r) {
    _mm512_storeu_pd(c + r * ldc, acc[r][0]);
    _mm512_storeu_pd(c + r * ldc + 8, acc[r][1]);
  }
}

template <int R>
inline void block_masked(std::size_t k, __mmask8 m, const double* a, std::size_t lda, const double* b,
                         std::size_t ldb, double* c, std::size_t ldc) {
  __m512d acc[R];
  for (int r = 0; r < R; ++r) acc[r] = _mm512_setzero_pd();
  for (std::size_t p = 0; p < k; ++p) {
    const __m512d b0 = _mm512_maskz_loadu_pd(m, b + p * ldb);
    for (int r = 0; r < R; ++r) acc[r] = _mm512_fmadd_pd(_mm512_set1_pd(a[r * lda + p]), b0, acc[r]);
  }
  for (int r = 0; r < R; ++r) _mm512_mask_storeu_pd(c + r * ldc, m, acc[r]);
}

template <int R>
inline void rows_block(std::size_t n, std::size_t k, const double* a, std::size_t lda, const double* b,
                       std::size_t ldb, double* c, std::size_t ldc) {
  std::size_t j = 0;
  for (; j + 16 <= n; j += 16) block_16<R>(k, a, lda, b + j, ldb, c + j, ldc);
  for (; j < n; j += 8) {
    const std::size_t rem = n - j < 8 ? n - j : 8;
    block_masked<R>(k, rem == 8 ? static_cast<__mmask8>(0xff) : tail_mask(rem), a, lda, b + j, ldb, c + j, ldc);
  }
}

void gemm_avx512(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda, const double* b,
                 std::size_t ldb, double* c, std::size_t ldc) {
  std::size_t i = 0;
  for (; i + 6 <= m; i += 6) rows_block<6>(n, k, a + i * lda, lda, b, ldb, c + i * ldc, ldc);
  switch (m - i) {
    case 5: rows_block<5>(n, k, a + i * lda, lda, b, ldb, c + i * ldc, ldc); break;
    case 4: rows_block<4>(n, k, a + i * lda, lda, b, ldb, c + i * ldc, ldc); break;
    case 3: rows_block<3>(n, k, a + i * lda, lda, b, ldb, c + i * ldc, ldc); break;
    case 2: rows_block<2>(n, k, a + i * lda, lda, b, ldb, c + i * ldc, ldc); break;
    case 1: rows_block<1>(n, k, a + i * lda, lda, b, ldb, c + i * ldc, ldc); break;
    default: break;
  }
}

}  // namespace

namespace detail {
const KernelTable avx512_table{dot_avx512, row_dots_avx512, row_wsq_avx512, normalize_rows_avx512, gemm_avx512};
}

}  // namespace ybl::simd
