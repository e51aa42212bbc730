#pragma once

#include <cstddef>
#include <functional>

namespace forge {

// Number of worker threads used by parallel_for. Honours FORGE_THREADS.
std::size_t worker_count();

// Splits [0, count) into contiguous chunks and runs body(begin, end) on each,
// possibly concurrently. Output placement must depend only on the index so
// results are independent of the split. Exceptions from workers are rethrown
// on the calling thread (the one from the lowest chunk wins).
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 1);

}  // namespace forge
