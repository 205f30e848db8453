#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lcg {

inline constexpr std::uint64_t kChunkSize = 1024;

inline unsigned resolve_workers(unsigned workers) {
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    return workers;
}

// Runs fn(begin, end) over fixed-size index chunks of [0, n) and folds the
// per-chunk results with += in chunk order. Because chunk boundaries and the
// fold order do not depend on the number of workers, neither does the result.
template <class Result, class Fn>
Result parallel_chunks(std::uint64_t n, unsigned workers, Fn fn, Result init = Result{}) {
    const std::uint64_t chunks = (n + kChunkSize - 1) / kChunkSize;
    std::vector<Result> partial(chunks);
    workers = static_cast<unsigned>(std::min<std::uint64_t>(resolve_workers(workers), std::max<std::uint64_t>(chunks, 1)));

    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= chunks) return;
            try {
                const std::uint64_t begin = c * kChunkSize;
                partial[c] = fn(begin, std::min(n, begin + kChunkSize));
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(chunks);
                return;
            }
        }
    };
    if (workers <= 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    Result out = std::move(init);
    for (auto& r : partial) out += r;
    return out;
}

// Elementwise-summing vector used as a chunk result.
template <class T>
struct SumVector {
    std::vector<T> v;
    SumVector& operator+=(const SumVector& o) {
        if (v.size() < o.v.size()) v.resize(o.v.size());
        for (std::size_t i = 0; i < o.v.size(); ++i) v[i] += o.v[i];
        return *this;
    }
};

// Concatenating vector used when the per-index outputs must be kept.
template <class T>
struct Collect {
    std::vector<T> v;
    Collect& operator+=(const Collect& o) {
        v.insert(v.end(), o.v.begin(), o.v.end());
        return *this;
    }
};

} // namespace lcg
