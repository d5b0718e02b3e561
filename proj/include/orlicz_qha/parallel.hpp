#pragma once

#include <cstddef>
#include <functional>

namespace oqha {

// Worker count: hardware concurrency, capped by ORLICZ_QHA_THREADS.
int thread_count();

// Splits [0, count) into a fixed number of contiguous chunks and runs
// fn(chunk, begin, end) for each. The partition does not depend on the
// thread count, so per-chunk results reduced in chunk order are identical
// however many workers run.
void parallel_chunks(std::size_t count, std::size_t chunks,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace oqha
