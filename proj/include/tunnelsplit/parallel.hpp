// Deterministic fork-join parallel_for over an index range.
#ifndef TUNNELSPLIT_PARALLEL_HPP
#define TUNNELSPLIT_PARALLEL_HPP

#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace tunnelsplit {

/*! \brief Resolve the worker count: explicit argument > TUNNELSPLIT_THREADS
 * env var > 1.  Zero/negative/garbage inputs fall back to 1. */
inline unsigned resolve_threads(int requested = 0) {
    long n = requested;
    if (n <= 0) {
        if (const char* env = std::getenv("TUNNELSPLIT_THREADS")) {
            char* end = nullptr;
            const long v = std::strtol(env, &end, 10);
            if (end != env && v > 0) n = v;
        }
    }
    if (n <= 0) n = 1;
    if (n > 256) n = 256;
    return static_cast<unsigned>(n);
}

/*! \brief Run body(i) for i in [0, n) on `threads` workers.
 *
 * Static block partition: worker t handles one contiguous chunk, so every
 * index is computed exactly once regardless of scheduling.  Results must be
 * written to disjoint, preallocated slots; any reduction happens serially
 * afterwards, which keeps outputs bitwise independent of the thread count.
 * The first exception thrown by any worker is rethrown on the caller.
 */
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
    if (n == 0) return;
    if (threads <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const unsigned nt = static_cast<unsigned>(
        std::min<std::size_t>(threads, n));
    std::vector<std::thread> pool;
    pool.reserve(nt);
    std::exception_ptr first_error;
    std::mutex err_mtx;
    const std::size_t chunk = (n + nt - 1) / nt;
    for (unsigned t = 0; t < nt; ++t) {
        const std::size_t lo = static_cast<std::size_t>(t) * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi]() {
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(err_mtx);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace tunnelsplit

#endif  // TUNNELSPLIT_PARALLEL_HPP
