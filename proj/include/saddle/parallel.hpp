#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace saddle {

/// Number of worker threads a computation may use. Modules receive this
/// budget; they never decide on thread counts themselves.
struct Parallelism
{
    unsigned workers = 1;
};

/// Run body(i) for i in [0, count). Tasks are handed out dynamically, but each
/// writes only to its own slot, so results are independent of `workers`.
/// The first exception thrown by any task is rethrown after all threads join.
template <typename Body>
void parallel_for(std::size_t count, Parallelism par, Body&& body)
{
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(std::max(1u, par.workers), count));
    if(workers <= 1)
    {
        for(std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        while(!failed.load(std::memory_order_relaxed))
        {
            const std::size_t i = next.fetch_add(1);
            if(i >= count)
                return;
            try
            {
                body(i);
            }
            catch(...)
            {
                std::lock_guard lock(error_mutex);
                if(!error)
                    error = std::current_exception();
                failed = true;
            }
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(workers);
    for(unsigned w = 0; w < workers; ++w)
        threads.emplace_back(worker);
    for(auto& t : threads)
        t.join();
    if(error)
        std::rethrow_exception(error);
}

} // namespace saddle
