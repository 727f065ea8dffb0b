#pragma once

#include <cstddef>
#include <functional>

namespace admg {

/// Worker count from the ADMG_THREADS environment variable, else the number of
/// hardware threads (at least 1).
std::size_t thread_count();

/// Calls body(i) for i in [0, count) on up to `threads` workers. Each index
/// runs exactly once; if any call throws, the exception from the lowest index
/// is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t threads = thread_count());

}  // namespace admg
