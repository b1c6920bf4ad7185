#pragma once

// Tiny job-parallel helper for independent (phi, eps, mode) solves.  Results
// are written into caller-owned slots by job index, so the merge order never
// depends on scheduling.  GAPFORGE_THREADS caps the worker count (0 = auto).

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace gapforge {

/// Worker count: GAPFORGE_THREADS when set (0 means auto), else hardware
/// concurrency, at least 1.
inline unsigned thread_budget() {
    unsigned budget = 0;
    if (const char* env = std::getenv("GAPFORGE_THREADS")) {
        const long parsed = std::strtol(env, nullptr, 10);
        if (parsed > 0) budget = static_cast<unsigned>(parsed);
    }
    if (budget == 0) budget = std::max(1u, std::thread::hardware_concurrency());
    return budget;
}

/// Runs fn(i) for i in [0, jobs) on up to thread_budget() threads.  The first
/// exception is rethrown on the calling thread after all workers finish.
inline void parallel_for(std::size_t jobs, const std::function<void(std::size_t)>& fn) {
    const unsigned budget = std::min<std::size_t>(thread_budget(), jobs);
    if (budget <= 1) {
        for (std::size_t i = 0; i < jobs; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(budget);
    for (unsigned t = 0; t < budget; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= jobs) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& worker : pool) worker.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace gapforge
