#pragma once

#include <cstddef>
#include <functional>

namespace regimesplit {

/// Worker threads available for embarrassingly parallel loops. Honours the
/// REGIMESPLIT_THREADS environment variable as a cap; at least 1.
std::size_t worker_count();

/// Calls body(i) for every i in [0, n), spread over worker_count() threads.
/// The first exception thrown by any call is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace regimesplit
