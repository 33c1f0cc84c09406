#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "ybl/error.hpp"
#include "ybl/parallel.hpp"

namespace ybl {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::dimension_unsupported: return "dimension-unsupported";
    case Errc::pole_dimension: return "pole-dimension";
    case Errc::divergent: return "divergent";
    case Errc::index_range: return "index-range";
    case Errc::certification_failed: return "certification-failed";
    case Errc::empty_range: return "empty-range";
    case Errc::non_symmetric: return "non-symmetric";
    case Errc::non_spd: return "non-spd";
    case Errc::non_finite: return "non-finite";
    case Errc::spec_invalid: return "spec-invalid";
    case Errc::invalid_argument: return "invalid-argument";
  }
  return "unknown";
}

unsigned thread_count() {
  if (const char* env = std::getenv("YBL_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace ybl
