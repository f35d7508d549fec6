// parallel.hpp — Deterministic block-wise parallel execution.
// Work is cut into fixed-size blocks; threads pull whole blocks and write into
// per-block slots; callers combine slots in block order. The combined result is
// bitwise independent of the thread count.

#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace dhist {

inline constexpr std::size_t kDefaultBlockSize = 32;

// fn(begin, end, block_index) is called once per block [begin,end).
inline void parallel_blocks(std::size_t n_items, std::size_t block_size, unsigned n_threads,
                            const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n_items == 0) return;
    if (block_size == 0) block_size = kDefaultBlockSize;
    const std::size_t n_blocks = (n_items + block_size - 1) / block_size;

    auto run_block = [&](std::size_t b) {
        const std::size_t begin = b * block_size;
        const std::size_t end = std::min(begin + block_size, n_items);
        fn(begin, end, b);
    };

    if (n_threads <= 1 || n_blocks == 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
        return;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= n_blocks) return;
            run_block(b);
        }
    };
    std::vector<std::thread> pool;
    const unsigned n = std::min<unsigned>(n_threads, static_cast<unsigned>(n_blocks));
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

inline std::size_t n_blocks_for(std::size_t n_items, std::size_t block_size = kDefaultBlockSize) {
    return n_items == 0 ? 0 : (n_items + block_size - 1) / block_size;
}

}  // namespace dhist
