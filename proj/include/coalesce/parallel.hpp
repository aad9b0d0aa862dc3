#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace coalesce {

inline unsigned default_workers() noexcept
{
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

/// Runs fn(r) for r in [0, count) on `workers` threads and returns the
/// results indexed by replicate. Replicates are claimed in fixed-size chunks
/// from a shared counter; since the result slot of a replicate never depends
/// on which worker ran it, callers that reduce the vector in index order get
/// output independent of the worker count.
template <class Fn>
auto run_replicates(std::size_t count, unsigned workers, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>>
{
    using Result = std::invoke_result_t<Fn&, std::size_t>;
    static_assert(!std::is_same_v<Result, bool>, "vector<bool> slots are not thread-safe");
    std::vector<Result> results(count);
    workers = std::max(1u, workers);
    if (workers == 1 || count < 2) {
        for (std::size_t r = 0; r < count; ++r) {
            results[r] = fn(r);
        }
        return results;
    }

    constexpr std::size_t kChunk = 64;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        try {
            for (;;) {
                const std::size_t begin = next.fetch_add(kChunk);
                if (begin >= count) {
                    return;
                }
                const std::size_t end = std::min(count, begin + kChunk);
                for (std::size_t r = begin; r < end; ++r) {
                    results[r] = fn(r);
                }
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
            next.store(count);
        }
    };

    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back(work);
    }
    pool.clear();
    if (failure) {
        std::rethrow_exception(failure);
    }
    return results;
}

} // namespace coalesce
