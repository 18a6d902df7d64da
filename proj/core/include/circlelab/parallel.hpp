#pragma once
#include <cstddef>
#include <cstdint>
#include <functional>

namespace circlelab {

// Process-wide worker budget. 0 restores the hardware default.
// Changing the thread count never changes numeric results: work is split
// into fixed-size chunks whose boundaries depend only on the item count,
// and chunk-indexed partials are reduced in chunk order.
void set_max_threads(unsigned n);
unsigned max_threads();

std::size_t chunk_count(std::uint64_t total, std::uint64_t chunk_size);

// Runs fn(chunk_index, begin, end) over [0, total) split into chunks of
// chunk_size items (last chunk may be short). Chunks are claimed by an
// atomic counter, so fn must be safe to call concurrently on disjoint
// chunks.
void parallel_chunks(std::uint64_t total, std::uint64_t chunk_size,
                     const std::function<void(std::size_t, std::uint64_t, std::uint64_t)>& fn);

// Deterministic sum of per-chunk partials: evaluates partial(chunk_index,
// begin, end) in parallel and adds the results in chunk order.
double parallel_sum(std::uint64_t total, std::uint64_t chunk_size,
                    const std::function<double(std::size_t, std::uint64_t, std::uint64_t)>& partial);

}  // namespace circlelab
