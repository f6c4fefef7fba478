#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace npplab {

// Run fn(i) for i in [0, count) on up to `threads` workers. Each index is
// claimed exactly once; fn must write only to its own slot, so scheduling
// can never change results.
template <typename F>
void run_indexed(std::size_t count, int threads, F&& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    const int workers = std::min<std::size_t>(threads, count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace npplab
