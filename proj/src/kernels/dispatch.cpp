#include "ybl/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace ybl::simd {
namespace {

Isa detect() {
  __builtin_cpu_init();
  Isa best = Isa::scalar;
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) best = Isa::avx2;
  if (__builtin_cpu_supports("avx512f")) best = Isa::avx512;
  if (const char* env = std::getenv("YBL_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
    if (std::strcmp(env, "avx2") == 0 && best != Isa::scalar) return Isa::avx2;
  }
  return best;
}

std::atomic<int>& current() {
  static std::atomic<int> isa{static_cast<int>(detect())};
  return isa;
}

}  // namespace

bool isa_supported(Isa isa) {
  __builtin_cpu_init();
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    case Isa::avx512: return __builtin_cpu_supports("avx512f");
  }
  return false;
}

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::avx512: return "avx512";
  }
  return "?";
}

const KernelTable& table(Isa isa) {
  switch (isa) {
    case Isa::avx2: return detail::avx2_table;
    case Isa::avx512: return detail::avx512_table;
    default: return detail::scalar_table;
  }
}

Isa active_isa() { return static_cast<Isa>(current().load(std::memory_order_relaxed)); }

const KernelTable& active() { return table(active_isa()); }

void force_isa(Isa isa) {
  if (!isa_supported(isa)) throw std::runtime_error(std::string("ISA not supported: ") + isa_name(isa));
  current().store(static_cast<int>(isa), std::memory_order_relaxed);
}

}  // namespace ybl::simd
