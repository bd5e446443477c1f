#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace crmimo::par {

int max_threads();
void set_max_threads(int n);

// Runs body(i) for i in [0, n). body must write only to slots addressed by i;
// with that contract the result is identical for any worker count.
template <class F>
void for_each_index(std::size_t n, F&& body) {
    const int threads = max_threads();
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const std::size_t grain = 64;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t begin = next.fetch_add(grain);
            if (begin >= n) return;
            const std::size_t end = begin + grain < n ? begin + grain : n;
            for (std::size_t i = begin; i < end; ++i) body(i);
        }
    };
    std::vector<std::thread> pool;
    const std::size_t t = static_cast<std::size_t>(threads) < n ? static_cast<std::size_t>(threads) : n;
    pool.reserve(t);
    for (std::size_t k = 0; k < t; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace crmimo::par
