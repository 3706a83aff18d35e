#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace hocl {

// Worker cap from HOCL_THREADS (0 or unset = hardware concurrency).
inline std::size_t thread_limit() {
    std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("HOCL_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
            // unparsable value: fall back to auto
        }
    }
    return hw;
}

// Runs job(k) for k in [0, count). Jobs must write only to their own slot;
// results are then independent of scheduling.
template <typename Job>
void parallel_jobs(std::size_t count, Job&& job) {
    const std::size_t workers = std::min(count, thread_limit());
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) job(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < count; k = next++) {
                try {
                    job(k);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace hocl
