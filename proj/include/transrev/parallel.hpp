#pragma once

#include <cstddef>
#include <functional>

namespace transrev {

/// Worker count: TRANSPORT_REVERSAL_THREADS if set and positive, otherwise
/// the hardware concurrency (0 means auto).
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Iterations must be independent. The first
/// exception thrown by any iteration is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace transrev
