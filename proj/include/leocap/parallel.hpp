#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace leocap {

/// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads.
///
/// Work is split into contiguous blocks; callers write results by index, so
/// any later reduction sees the same order regardless of thread count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned threads = 0) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    const std::size_t block = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = t * block, hi = std::min(n, lo + block);
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::scoped_lock lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

/// Pairwise summation in a fixed tree order.
template <typename It>
double pairwise_sum(It first, It last) {
    const auto n = last - first;
    if (n <= 8) {
        double s = 0.0;
        for (; first != last; ++first) s += *first;
        return s;
    }
    const It mid = first + n / 2;
    return pairwise_sum(first, mid) + pairwise_sum(mid, last);
}

} // namespace leocap
