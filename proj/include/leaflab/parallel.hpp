#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace leaflab {

/// Run body(i) for i in [0, n) on up to `workers` threads. Work is handed out
/// by index and callers write results into per-index slots, so the output
/// never depends on the worker count. If several indices throw, the
/// exception of the smallest index is rethrown.
template <class Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
    const std::size_t w = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1)));
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto run = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(w - 1);
    for (std::size_t t = 1; t < w; ++t) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// splitmix64 finalizer, used to derive independent stream seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace leaflab
