#ifndef STRUCT_IMITATE_PARALLEL_HPP
#define STRUCT_IMITATE_PARALLEL_HPP

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace struct_imitate {

/// Worker count: STRUCT_IMITATE_THREADS if set to a positive integer,
/// otherwise the hardware concurrency.
inline std::size_t thread_budget()
{
    std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("STRUCT_IMITATE_THREADS")) {
        try {
            long v = std::stol(env);
            if (v > 0)
                return static_cast<std::size_t>(v);
        }
        catch (const std::exception&) {
        }
    }
    return hw;
}

/// Calls fn(i) for i in [0, count). Each index is handled by exactly one
/// worker, so writing results into slot i keeps output order deterministic.
/// If any calls throw, the exception from the lowest index is rethrown on
/// the caller, so the reported error does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn, std::size_t max_threads = thread_budget())
{
    std::size_t workers = std::min(max_threads, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }

    std::exception_ptr failure;
    std::size_t failed_index = count;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) {
                try {
                    fn(i);
                }
                catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (i < failed_index) {
                        failed_index = i;
                        failure = std::current_exception();
                    }
                    return;
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace struct_imitate

#endif // STRUCT_IMITATE_PARALLEL_HPP
