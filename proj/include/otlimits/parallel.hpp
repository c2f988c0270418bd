#pragma once

#include <cstddef>
#include <functional>

namespace otl {

/// Worker count: OTLIMITS_THREADS when set to a positive integer, otherwise
/// the hardware concurrency.
std::size_t thread_count();

/// Runs fn(i) for i in [0, n) over a static partition. Each index is
/// independent, so results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace otl
