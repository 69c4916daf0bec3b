#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace adasharp {

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. Work items must
/// only touch item-private state. If several items throw, the exception of
/// the lowest index is rethrown, so failures are reported deterministically.
template <class Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
    if (count == 0) {
        return;
    }
    const auto workers = static_cast<std::size_t>(std::clamp<long long>(
        jobs, 1, static_cast<long long>(count)));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }

    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace adasharp
