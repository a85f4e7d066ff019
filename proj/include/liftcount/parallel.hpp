#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace liftcount {

/// Worker count used by the engine. 0 restores the default (all cores).
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Fixed partition of [0, n) into contiguous blocks. The partition depends
/// only on n, never on the thread count, so block-ordered reductions give
/// the same bits for every --threads setting.
inline constexpr std::size_t kReductionBlocks = 64;

inline std::size_t block_count(std::size_t n) { return std::min(kReductionBlocks, n); }

/// Runs body(block, begin, end) for every block of [0, n), spread over
/// thread_count() workers. Rethrows the first exception after all workers
/// finish.
template <class Body>
void parallel_blocks(std::size_t n, Body&& body) {
    const std::size_t blocks = block_count(n);
    if (blocks == 0) return;
    auto lo = [&](std::size_t b) { return n / blocks * b + std::min(b, n % blocks); };
    const std::size_t workers = std::min(thread_count(), blocks);
    if (workers <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) body(b, lo(b), lo(b + 1));
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    auto run = [&](std::size_t w) {
        try {
            for (std::size_t b = next++; b < blocks; b = next++) body(b, lo(b), lo(b + 1));
        } catch (...) {
            errors[w] = std::current_exception();
            next = blocks;
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run, w);
    run(0);
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace liftcount
