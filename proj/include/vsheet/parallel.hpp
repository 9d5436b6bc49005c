#pragma once

#include <cstddef>
#include <functional>

namespace vsheet {

/// Worker count used by data-parallel loops. 0 selects the hardware
/// concurrency; the VSHEET_THREADS environment variable seeds the default.
void set_thread_count(unsigned count);
unsigned thread_count();

/// Calls body(i) for every i in [0, n), split into contiguous blocks over
/// the worker pool. body must only write to slots owned by index i, which
/// keeps results independent of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace vsheet
