#include "circlelab/parallel.hpp"

#include <atomic>
#include <algorithm>
#include <thread>
#include <vector>

namespace circlelab {

namespace {
std::atomic<unsigned> g_max_threads{0};

unsigned hardware_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}
}  // namespace

void set_max_threads(unsigned n) { g_max_threads.store(n); }

unsigned max_threads() {
    unsigned n = g_max_threads.load();
    return n == 0 ? hardware_threads() : n;
}

std::size_t chunk_count(std::uint64_t total, std::uint64_t chunk_size) {
    if (total == 0) return 0;
    return static_cast<std::size_t>((total + chunk_size - 1) / chunk_size);
}

void parallel_chunks(std::uint64_t total, std::uint64_t chunk_size,
                     const std::function<void(std::size_t, std::uint64_t, std::uint64_t)>& fn) {
    const std::size_t chunks = chunk_count(total, chunk_size);
    if (chunks == 0) return;

    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(max_threads(), chunks));
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) {
            const std::uint64_t b = c * chunk_size;
            fn(c, b, std::min<std::uint64_t>(b + chunk_size, total));
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks) return;
            const std::uint64_t b = c * chunk_size;
            fn(c, b, std::min<std::uint64_t>(b + chunk_size, total));
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned i = 0; i + 1 < workers; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
}

double parallel_sum(std::uint64_t total, std::uint64_t chunk_size,
                    const std::function<double(std::size_t, std::uint64_t, std::uint64_t)>& partial) {
    const std::size_t chunks = chunk_count(total, chunk_size);
    std::vector<double> partials(chunks, 0.0);
    parallel_chunks(total, chunk_size,
                    [&](std::size_t c, std::uint64_t b, std::uint64_t e) { partials[c] = partial(c, b, e); });
    // chunk-order compensated reduction
    double sum = 0.0, comp = 0.0;
    for (double p : partials) {
        const double y = p - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

}  // namespace circlelab
