#pragma once

#include <cstddef>
#include <functional>

namespace ybl {

// Worker count: YBL_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

// Runs body(i) for i in [0, count). Each index is handled by exactly one
// worker; callers write results into slot i so reductions stay ordered.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace ybl
