#include "ybl/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace ybl::simd {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t len) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd(), s3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= len; i += 16) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
    s2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), s2);
    s3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), s3);
  }
  for (; i + 4 <= len; i += 4) s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
  double s = hsum(_mm256_add_pd(_mm256_add_pd(s0, s1), _mm256_add_pd(s2, s3)));
  for (; i < len; ++i) s += a[i] * b[i];
  return s;
}

void row_dots_avx2(const double* a, const double* b, std::size_t rows, std::size_t cols, double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_avx2(a + r * cols, b + r * cols, cols);
}

void row_wsq_avx2(const double* a, const double* w, std::size_t rows, std::size_t cols, double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a + r * cols;
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c + 8 <= cols; c += 8) {
      __m256d x0 = _mm256_loadu_pd(row + c), x1 = _mm256_loadu_pd(row + c + 4);
      s0 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + c), x0), x0, s0);
      s1 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + c + 4), x1), x1, s1);
    }
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; c < cols; ++c) s += w[c] * row[c] * row[c];
    out[r] = s;
  }
}

void normalize_rows_avx2(double* a, std::size_t rows, std::size_t cols, double* norms) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = a + r * cols;
    const double nrm = std::sqrt(dot_avx2(row, row, cols));
    norms[r] = nrm;
    const double inv = 1.0 / nrm;
    const __m256d vi = _mm256_set1_pd(inv);
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4) _mm256_storeu_pd(row + c, _mm256_mul_pd(_mm256_loadu_pd(row + c), vi));
    for (; c < cols; ++c) row[c] *= inv;
  }
}

template <int R>
inline void block_8(std::size_t k, const double* a, std::size_t lda, const double* b, std::size_t ldb, double* c,
                    std::size_t ldc) {
  __m256d acc[R][2];
  for (int r = 0; r < R; ++r) acc[r][0] = acc[r][1] = _mm256_setzero_pd();
  for (std::size_t p = 0; p < k; ++p) {
    const __m256d b0 = _mm256_loadu_pd(b + p * ldb);
    const __m256d b1 = _mm256_loadu_pd(b + p * ldb + 4);
    for (int r = 0; r < R; ++r) {
      const __m256d av = _mm256_broadcast_sd(a + r * lda + p);
      acc[r][0] = _mm256_fmadd_pd(av, b0, acc[r][0]);
      acc[r][1] = _mm256_fmadd_pd(av, b1, acc[r][1]);
    }
  }
  for (int r = 0; r < R; ++r) {
    _mm256_storeu_pd(c + r * ldc, acc[r][0]);
    _mm256_storeu_pd(c + r * ldc + 4, acc[r][1]);
  }
}

template <int R>
inline void rows_block(std::size_t n, std::size_t k, const double* a, std::size_t lda, const double* b,
                       std::size_t ldb, double* c, std::size_t ldc) {
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) block_8<R>(k, a, lda, b + j, ldb, c + j, ldc);
  for (; j < n; ++j) {
    for (int r = 0; r < R; ++r) {
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += a[r * lda + p] * b[p * ldb + j];
      c[r * ldc + j] = s;
    }
  }
}

void gemm_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda, const double* b,
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
const KernelTable avx2_table{dot_avx2, row_dots_avx2, row_wsq_avx2, normalize_rows_avx2, gemm_avx2};
}

}  // namespace ybl::simd
