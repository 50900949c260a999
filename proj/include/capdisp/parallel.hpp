#pragma once

#include <cstdint>
#include <functional>

namespace capdisp {

// Worker count: CAPDISP_THREADS if set (>=1), otherwise hardware concurrency.
int worker_count();

// Runs body(chunk_index) for chunk_index in [0, chunks) on a small pool.
// Chunks may execute in any order; callers must make results order-independent
// (write into per-chunk slots and combine sequentially afterwards).
void run_chunks(std::int64_t chunks, const std::function<void(std::int64_t)>& body);

// Convenience: body(i) for i in [0, n), grain items per chunk.
void parallel_for(std::int64_t n, std::int64_t grain, const std::function<void(std::int64_t)>& body);

}  // namespace capdisp
