#pragma once

#include <cstddef>
#include <functional>

namespace flowcritic {

// Runs fn(i) for i in [0, count) on a few threads, contiguous ranges per
// thread. Each index must touch only its own output slot; results are then
// independent of scheduling and bit-identical to a serial run.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace flowcritic
