#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace logbm {

/// Runs fn(i) for i in [0, tasks) on up to `jobs` threads. Tasks are handed
/// out dynamically; callers write results into per-task slots so the outcome
/// never depends on scheduling. The first exception is rethrown.
template <class Fn>
void parallel_for(int tasks, int jobs, Fn&& fn) {
    jobs = std::max(1, std::min(jobs, tasks));
    if (jobs == 1) {
        for (int i = 0; i < tasks; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < tasks; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = tasks;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace logbm
