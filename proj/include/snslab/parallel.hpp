#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace snslab {

// Runs fn(i) for i in [0, n). Work is partitioned by index, results must be
// written to per-index slots by the caller; reductions over those slots stay
// in index order, so outputs are identical for any thread count.
template <typename Fn>
inline void parallel_for(std::size_t n, int threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t nt = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        pool.emplace_back([&, t]() {
            for (std::size_t i = t; i < n; i += nt) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace snslab
