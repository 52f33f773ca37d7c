#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rov::par {

// Reductions accumulate per-block partials over fixed-size blocks and combine
// them in block order. The block boundaries do not depend on the thread
// count, so every reduction below is bit-identical whether it runs on one
// thread or many. This is the contract the determinism tests pin down.
inline constexpr std::size_t kBlockSize = 2048;

inline std::size_t block_count(std::size_t n) {
    return (n + kBlockSize - 1) / kBlockSize;
}

template <typename F>
void parallel_for(std::size_t n, F&& body) {
    const auto sn = static_cast<std::ptrdiff_t>(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < sn; ++i) {
        body(static_cast<std::size_t>(i));
    }
}

// body(block_index, begin, end)
template <typename F>
void parallel_blocks(std::size_t n, F&& body) {
    const auto nb = static_cast<std::ptrdiff_t>(block_count(n));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t b = 0; b < nb; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kBlockSize;
        const std::size_t hi = std::min(n, lo + kBlockSize);
        body(static_cast<std::size_t>(b), lo, hi);
    }
}

template <typename F>
double block_sum(std::size_t n, F&& term) {
    std::vector<double> partial(block_count(n), 0.0);
    parallel_blocks(n, [&](std::size_t b, std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            s += term(i);
        }
        partial[b] = s;
    });
    double total = 0.0;
    for (double p : partial) {
        total += p;
    }
    return total;
}

template <typename Pred>
std::size_t block_count_if(std::size_t n, Pred&& pred) {
    std::vector<std::size_t> partial(block_count(n), 0);
    parallel_blocks(n, [&](std::size_t b, std::size_t lo, std::size_t hi) {
        std::size_t c = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            if (pred(i)) ++c;
        }
        partial[b] = c;
    });
    std::size_t total = 0;
    for (std::size_t c : partial) {
        total += c;
    }
    return total;
}

} // namespace rov::par
