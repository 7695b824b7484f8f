#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace fluorospec {

/// Worker cap from FLUOROSPEC_THREADS (0 or unset selects hardware concurrency).
std::size_t worker_count();

/// Runs fn(i) for i in [0, n) over contiguous chunks. Each index is visited
/// exactly once, so results written to per-index slots do not depend on the
/// worker count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t workers = worker_count()) {
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
}

/// Pairwise (cascade) summation in index order; the result depends only on
/// the values and their order.
template <class T>
T pairwise_sum(const T* data, std::size_t n) {
    if (n == 0) return T{};
    if (n <= 8) {
        T acc = data[0];
        for (std::size_t i = 1; i < n; ++i) acc = acc + data[i];
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

}  // namespace fluorospec
