#pragma once

#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace preduq {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? int(hw) : 1;
}

/**
 * Runs fn over [0, n) split into contiguous chunks across `threads` workers.
 * Callers must write results keyed by index only; any reduction that depends
 * on evaluation order has to happen after this returns, in index order, so
 * results do not depend on the thread count.
 */
inline void parallel_for_chunks(Eigen::Index n, int threads,
                                const std::function<void(Eigen::Index, Eigen::Index)>& fn) {
    threads = resolve_threads(threads);
    if (n <= 0) return;
    if (threads <= 1 || n == 1) {
        fn(0, n);
        return;
    }
    const int workers = int(std::min<Eigen::Index>(threads, n));
    const Eigen::Index chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
        const Eigen::Index begin = w * chunk;
        const Eigen::Index end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace preduq
