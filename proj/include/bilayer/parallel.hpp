// parallel.hpp — fixed-partition parallel loops
//
// Work is always split into the same tasks regardless of the thread count;
// callers write per-task results into preallocated slots and reduce them in
// index order, so outputs are bitwise independent of the degree of
// parallelism. BILATTICE_THREADS caps the number of worker threads.

#pragma once

#include <cstddef>
#include <functional>

namespace bilayer {

/// Worker count: BILATTICE_THREADS when set (1..256), else the hardware thread count.
std::size_t max_threads();

/// Runs body(i) for i in [0, n_tasks). Tasks are handed out dynamically; the
/// body must only touch state owned by task i. Exceptions are rethrown on the
/// calling thread (the first one raised wins).
void parallel_for(std::size_t n_tasks, const std::function<void(std::size_t)>& body);

} // namespace bilayer
