#include "fmpl/parallel.hpp"

#include <cstdlib>

namespace fmpl {

namespace {

std::atomic<int> g_override{0};

int env_workers() {
    if (const char* env = std::getenv("FMPLAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

int worker_count() {
    const int o = g_override.load(std::memory_order_relaxed);
    return o > 0 ? o : env_workers();
}

void set_worker_count(int workers) { g_override.store(workers, std::memory_order_relaxed); }

namespace detail {

void run_blocks(std::size_t n_blocks, const std::function<void(std::size_t)>& block_fn) {
    const int workers = worker_count();
    if (workers <= 1 || n_blocks <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) block_fn(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto drain = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
            if (b >= n_blocks) return;
            block_fn(b);
        }
    };
    const int spawned = static_cast<int>(std::min<std::size_t>(
        static_cast<std::size_t>(workers) - 1, n_blocks - 1));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(spawned));
    for (int t = 0; t < spawned; ++t) pool.emplace_back(drain);
    drain();
    for (auto& th : pool) th.join();
}

}  // namespace detail

}  // namespace fmpl
