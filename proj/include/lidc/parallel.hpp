#pragma once

#include <cstddef>
#include <functional>
#include <optional>

namespace lidc {

/// Explicit request wins, then LIDC_THREADS, then hardware concurrency.
unsigned resolve_threads(std::optional<unsigned> requested = std::nullopt);

/// Splits [0, n) into at most `threads` contiguous chunks and calls
/// fn(begin, end, chunk) for each. Chunk boundaries depend only on n and
/// threads. Exceptions from workers are rethrown on the calling thread.
void parallel_chunks(std::size_t n, unsigned threads,
                     const std::function<void(std::size_t, std::size_t, unsigned)>& fn);

/// Calls fn(i) for every i in [0, n), distributing indices over threads.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace lidc
