#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace hawkes_impact {

/// Worker cap from HAWKES_IMPACT_THREADS, else the hardware concurrency.
std::size_t worker_count();

/// Runs job(i) for i in [0, n) on up to `workers` threads and calls
/// fold(i, result) strictly in index order. Results are produced in batches so
/// memory stays bounded; the fold sees the same sequence for any worker count.
template <class Job, class Fold>
void ordered_fold(std::size_t n, Job job, Fold fold, std::size_t workers = worker_count()) {
    using R = decltype(job(std::size_t{0}));
    workers = std::max<std::size_t>(1, workers);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fold(i, job(i));
        return;
    }
    const std::size_t batch = 8 * workers;
    std::vector<std::optional<R>> slots(batch);
    for (std::size_t start = 0; start < n; start += batch) {
        const std::size_t count = std::min(batch, n - start);
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        auto run = [&] {
            for (;;) {
                const std::size_t k = next.fetch_add(1);
                if (k >= count) return;
                try {
                    slots[k].emplace(job(start + k));
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        };
        {
            std::vector<std::jthread> pool;
            for (std::size_t w = 1; w < std::min(workers, count); ++w) pool.emplace_back(run);
            run();
        }
        if (error) std::rethrow_exception(error);
        for (std::size_t k = 0; k < count; ++k) {
            fold(start + k, std::move(*slots[k]));
            slots[k].reset();
        }
    }
}

}  // namespace hawkes_impact
