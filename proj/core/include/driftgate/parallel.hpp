#pragma once

#include <cstddef>
#include <functional>

namespace driftgate {

// Worker cap: DRIFTGATE_THREADS when set (>= 1), else hardware concurrency.
int default_thread_count();

// Runs body(0..n-1) on up to `threads` workers. Tasks write into
// preallocated slots indexed by task id, so results are position-stable and
// independent of scheduling; exceptions propagate to the caller.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace driftgate
