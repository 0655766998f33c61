#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace fmpl {

/// Worker count: FMPLAB_THREADS if set, otherwise available parallelism.
int worker_count();

/// Overrides the environment-controlled worker count (0 = back to automatic).
void set_worker_count(int workers);

namespace detail {

constexpr std::size_t kBlockSize = 128;

void run_blocks(std::size_t n_blocks, const std::function<void(std::size_t)>& block_fn);

}  // namespace detail

/// Runs f(i) for i in [0, n) across workers. Writes must be disjoint per i.
template <class F>
void parallel_for(std::size_t n, F&& f) {
    const std::size_t nb = (n + detail::kBlockSize - 1) / detail::kBlockSize;
    detail::run_blocks(nb, [&](std::size_t b) {
        const std::size_t lo = b * detail::kBlockSize;
        const std::size_t hi = std::min(n, lo + detail::kBlockSize);
        for (std::size_t i = lo; i < hi; ++i) f(i);
    });
}

/// Sum of f(i) over [0, n), bit-reproducible for any worker count: items are
/// accumulated sequentially inside fixed-size blocks and block partials are
/// combined along a fixed binary tree, so the rounding pattern never depends
/// on scheduling.
template <class F>
double deterministic_sum(std::size_t n, F&& f) {
    const std::size_t nb = (n + detail::kBlockSize - 1) / detail::kBlockSize;
    if (nb == 0) return 0.0;
    std::vector<double> partial(nb, 0.0);
    detail::run_blocks(nb, [&](std::size_t b) {
        const std::size_t lo = b * detail::kBlockSize;
        const std::size_t hi = std::min(n, lo + detail::kBlockSize);
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) acc += f(i);
        partial[b] = acc;
    });
    for (std::size_t stride = 1; stride < nb; stride *= 2)
        for (std::size_t i = 0; i + stride < nb; i += 2 * stride) partial[i] += partial[i + stride];
    return partial[0];
}

}  // namespace fmpl
