#pragma once

#include <cstddef>

namespace ybl::simd {

enum class Isa { scalar, avx2, avx512 };

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t len);
  // out[r] = sum_c a[r*cols+c] * b[r*cols+c]
  void (*row_dots)(const double* a, const double* b, std::size_t rows, std::size_t cols, double* out);
  // out[r] = sum_c w[c] * a[r*cols+c]^2
  void (*row_wsq)(const double* a, const double* w, std::size_t rows, std::size_t cols, double* out);
  // scales every row to unit length, writes the original lengths to norms
  void (*normalize_rows)(double* a, std::size_t rows, std::size_t cols, double* norms);
  // c = a * b, row-major; a is m x k, b is k x n, c is m x n
  void (*gemm)(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda,
               const double* b, std::size_t ldb, double* c, std::size_t ldc);
};

bool isa_supported(Isa isa);
const char* isa_name(Isa isa);
const KernelTable& table(Isa isa);

// Best supported ISA unless YBL_SIMD names a narrower one.
Isa active_isa();
const KernelTable& active();
// Test hook; throws if the ISA is not supported on this CPU.
void force_isa(Isa isa);

inline double dot(const double* a, const double* b, std::size_t len) { return active().dot(a, b, len); }
inline void row_dots(const double* a, const double* b, std::size_t rows, std::size_t cols, double* out) {
  active().row_dots(a, b, rows, cols, out);
}
inline void row_wsq(const double* a, const double* w, std::size_t rows, std::size_t cols, double* out) {
  active().row_wsq(a, w, rows, cols, out);
}
inline void normalize_rows(double* a, std::size_t rows, std::size_t cols, double* norms) {
  active().normalize_rows(a, rows, cols, norms);
}
inline void gemm(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda, const double* b,
                 std::size_t ldb, double* c, std::size_t ldc) {
  active().gemm(m, n, k, a, lda, b, ldb, c, ldc);
}

namespace detail {
extern const KernelTable scalar_table;
extern const KernelTable avx2_table;
extern const KernelTable avx512_table;
}  // namespace detail

}  // namespace ybl::simd
