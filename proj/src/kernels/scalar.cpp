#include "ybl/kernels.hpp"

#include <cmath>

namespace ybl::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t len) {
  double s = 0.0;
  for (std::size_t i = 0; i < len; ++i) s += a[i] * b[i];
  return s;
}

void row_dots_scalar(const double* a, const double* b, std::size_t rows, std::size_t cols, double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_scalar(a + r * cols, b + r * cols, cols);
}

void row_wsq_scalar(const double* a, const double* w, std::size_t rows, std::size_t cols, double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a + r * cols;
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += w[c] * row[c] * row[c];
    out[r] = s;
  }
}

void normalize_rows_scalar(double* a, std::size_t rows, std::size_t cols, double* norms) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = a + r * cols;
    const double nrm = std::sqrt(dot_scalar(row, row, cols));
    norms[r] = nrm;
    const double inv = 1.0 / nrm;
    for (std::size_t c = 0; c < cols; ++c) row[c] *= inv;
  }
}

void gemm_scalar(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda, const double* b,
                 std::size_t ldb, double* c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * ldc;
    for (std::size_t j = 0; j < n; ++j) ci[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * lda + p];
      const double* bp = b + p * ldb;
      for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
}

}  // namespace

namespace detail {
const KernelTable scalar_table{dot_scalar, row_dots_scalar, row_wsq_scalar, normalize_rows_scalar, gemm_scalar};
}

}  // namespace ybl::simd
