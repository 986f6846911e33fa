#pragma once

#include <cstddef>
#include <functional>

namespace mubcert {

/// Worker count from MUBCERT_THREADS (default 1).
unsigned configured_threads();

/// Runs body(begin, end) over contiguous chunks of [0, n) on up to `threads`
/// threads. Chunk boundaries depend only on n and the thread count.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace mubcert
