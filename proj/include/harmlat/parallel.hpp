#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace harmlat {

// Worker count: hardware concurrency, capped by HARMLAT_THREADS when set.
inline unsigned thread_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("HARMLAT_THREADS")) {
        try {
            long cap = std::stol(env);
            if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
        } catch (...) {
        }
    }
    return n;
}

// Calls body(begin, end) on disjoint chunks of [0, count). Results must not
// depend on the chunking; callers write to disjoint output ranges only.
template <class Body>
void parallel_for(std::size_t count, Body&& body, std::size_t min_chunk = 4096) {
    unsigned workers = thread_count();
    std::size_t chunks = std::min<std::size_t>(workers, (count + min_chunk - 1) / std::max<std::size_t>(min_chunk, 1));
    if (chunks <= 1) {
        body(std::size_t{0}, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(chunks - 1);
    std::size_t step = (count + chunks - 1) / chunks;
    for (std::size_t c = 1; c < chunks; ++c) {
        std::size_t b = c * step, e = std::min(count, b + step);
        if (b < e) pool.emplace_back([&body, b, e] { body(b, e); });
    }
    body(std::size_t{0}, std::min(count, step));
    for (auto& t : pool) t.join();
}

}  // namespace harmlat
