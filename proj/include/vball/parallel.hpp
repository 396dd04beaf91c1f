#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace vball {

inline int default_workers() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

// Runs fn(i) for i in [0, n). Each index is processed exactly once; callers
// must write only to per-index slots so results are identical for any worker
// count.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    if (workers <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t nw = std::min<std::size_t>(workers, n);
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (std::size_t w = 0; w < nw; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += nw) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace vball
