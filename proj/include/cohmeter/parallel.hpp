// parallel.hpp — bounded worker pool for independent work items.
//
// The COHMETER_THREADS environment variable caps parallelism (0 or unset
// means auto). Work items write to disjoint slots, so results never depend
// on the number of threads actually used.

#pragma once

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace cohmeter {

namespace detail {
inline int& thread_cap_storage() {
    static int cap = -2;  // -2 = not yet read from the environment
    return cap;
}
}  // namespace detail

inline void set_thread_cap(int cap) { detail::thread_cap_storage() = cap; }

inline int thread_cap() {
    int& cap = detail::thread_cap_storage();
    if (cap == -2) {
        const char* env = std::getenv("COHMETER_THREADS");
        cap = 0;
        if (env != nullptr) {
            try {
                cap = std::stoi(env);
            } catch (...) {
                cap = 0;
            }
        }
    }
    if (cap <= 0) {
        unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : static_cast<int>(hw);
    }
    return cap;
}

template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    if (count == 0) return;
    std::size_t workers = static_cast<std::size_t>(thread_cap());
    if (workers > count) workers = count;
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> cursor{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t i = cursor.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace cohmeter
