#ifndef DYM_PARALLEL_HPP
#define DYM_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace dym {

// DYM_THREADS if set (>= 1), otherwise the hardware concurrency.
unsigned worker_count();

// Runs fn(i) for i in [0, n). Results must go to per-index slots so the outcome does not
// depend on scheduling. The exception thrown for the smallest index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace dym

#endif
