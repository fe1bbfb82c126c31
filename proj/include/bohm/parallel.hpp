#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bohm
{

/*!
 * Run body(i) for i in [0, n) over `width` threads in contiguous chunks.
 *
 * Each index is handled exactly once and never shares mutable state with
 * another, so results do not depend on the width. The first exception thrown
 * by any worker is rethrown on the calling thread.
 */
template<class F>
void parallel_for(std::size_t n, unsigned width, F&& body)
{
    width = std::max(1u, width);
    if (width == 1 || n < 2)
    {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }

    std::size_t const chunks = std::min<std::size_t>(width, n);
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> workers;
        workers.reserve(chunks);
        for (std::size_t c = 0; c < chunks; ++c)
        {
            std::size_t const begin = n * c / chunks;
            std::size_t const end = n * (c + 1) / chunks;
            workers.emplace_back([&, begin, end] {
                try
                {
                    for (std::size_t i = begin; i < end; ++i)
                        body(i);
                }
                catch (...)
                {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            });
        }
    }
    if (error)
        std::rethrow_exception(error);
}

}  // namespace bohm
