#pragma once

#include <cstddef>
#include <functional>

namespace jtm {

/// Worker count: `requested` if non-zero, else the hardware concurrency; in both
/// cases capped by the JTM_THREADS environment variable when it is set.
unsigned resolve_threads(unsigned requested = 0);

/// Runs body(i) for i in [0, count) on up to `threads` workers. The first
/// exception thrown by any task is rethrown after all workers have joined.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace jtm
