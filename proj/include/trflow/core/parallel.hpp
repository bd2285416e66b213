#pragma once

#include <cstddef>
#include <functional>

namespace trflow {

// Worker count for parallel_for; 1 runs inline. Values < 1 mean "hardware".
void set_threads(int n);
int threads();

// Splits [0, n) into contiguous static chunks, one per worker. Work items
// must be independent; reductions are left to the caller so that their
// order does not depend on the thread count. The first exception (in chunk
// order) is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace trflow
