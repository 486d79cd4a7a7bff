#pragma once

#include <cstddef>
#include <functional>

namespace nvbeat {

/// Calls fn(i) for i in [0, n) on up to `threads` worker threads (values < 2
/// run inline). fn must only write to per-index state. The first exception
/// thrown by any call is rethrown after all workers finish.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace nvbeat
