#pragma once

#include <cstddef>
#include <functional>

namespace bikelab {

/// Worker count: hardware concurrency capped by BIKELAB_THREADS.
unsigned thread_count();

/// Runs fn(i) for i in [0, n). Each index writes only its own slot, so
/// results are independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace bikelab
