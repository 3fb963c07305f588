#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace polyasim {

// Runs fn(i) for i in [0, reps), spreading work across `threads` workers, and
// returns the results indexed by replicate. Each replicate derives all of its
// randomness from its own index, and the output slot is fixed by the index, so
// the returned vector is identical for any worker count; reductions over it
// must then be performed sequentially by the caller.
template <typename Fn>
auto run_replicates(long long reps, unsigned threads, Fn&& fn)
    -> std::vector<decltype(fn(0LL))> {
    using Result = decltype(fn(0LL));
    std::vector<Result> results(static_cast<std::size_t>(reps));
    if (threads <= 1 || reps < 2) {
        for (long long i = 0; i < reps; ++i) results[static_cast<std::size_t>(i)] = fn(i);
        return results;
    }
    std::atomic<long long> next{0};
    auto worker = [&]() {
        for (;;) {
            const long long i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= reps) return;
            results[static_cast<std::size_t>(i)] = fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return results;
}

} // namespace polyasim
