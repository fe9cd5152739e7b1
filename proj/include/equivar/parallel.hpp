#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace equivar {

/// Worker-pool size: explicit request, else EQUIVAR_THREADS, else the
/// machine parallelism.
inline int pool_size(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("EQUIVAR_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? int(hc) : 1;
}

/// Run fn(i) for i in [0, n) on a bounded pool. fn must write only to its
/// own slot; results are indexed, so the output is independent of
/// scheduling.
inline void parallel_for(int n, int threads,
                         const std::function<void(int)>& fn) {
    const int t = std::min(pool_size(threads), n);
    if (t <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex err_mutex;
    pool.reserve(t);
    for (int w = 0; w < t; ++w) {
        pool.emplace_back([&]() {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace equivar
