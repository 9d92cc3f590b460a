#pragma once

#include <cstddef>
#include <functional>

namespace gridshield {

/// 0 means "use std::thread::hardware_concurrency()".
unsigned resolve_jobs(unsigned jobs);

/// Calls body(i) for i in [0, count) on up to `jobs` threads. Work is handed
/// out by index; callers write results into pre-sized slots so the outcome
/// is independent of scheduling. The first exception thrown by any worker is
/// rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body);

}  // namespace gridshield
