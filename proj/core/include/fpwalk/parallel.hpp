#pragma once

#include <cstddef>
#include <functional>

namespace fpwalk {

/// Runs body(i) for i in [0, n) on up to `threads` workers. Callers write
/// results into slot i, so the outcome does not depend on scheduling.
/// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

/// Worker count used when a caller passes threads <= 0.
int default_threads();

}  // namespace fpwalk
