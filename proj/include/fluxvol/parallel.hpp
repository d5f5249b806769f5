#pragma once

#include <cstddef>
#include <functional>

namespace fluxvol {

/// Number of worker threads; 0 selects the hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Calls body(i) for i in [0, n). Work is split into contiguous chunks; the
/// first exception thrown by any body is rethrown after all workers finish.
/// Callers write results by index, so output does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fluxvol
