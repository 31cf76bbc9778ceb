// parallel.cpp — fixed-partition parallel loops

#include "bilayer/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace bilayer {

std::size_t max_threads() {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("BILATTICE_THREADS")) {
        try {
            const long cap = std::stol(env);
            // An explicit value is honoured even above the core count so that
            // thread-count independence can be exercised on small machines.
            if (cap >= 1) n = static_cast<std::size_t>(std::min(cap, 256L));
        } catch (const std::exception&) {
            // unparsable values are ignored
        }
    }
    return n;
}

void parallel_for(std::size_t n_tasks, const std::function<void(std::size_t)>& body) {
    const std::size_t n_workers = std::min(max_threads(), n_tasks);
    if (n_workers <= 1) {
        for (std::size_t i = 0; i < n_tasks; ++i) body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_tasks) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n_tasks);
                return;
            }
        }
    };

    std::vector<std::jthread> pool;
    pool.reserve(n_workers - 1);
    for (std::size_t t = 1; t < n_workers; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

} // namespace bilayer
