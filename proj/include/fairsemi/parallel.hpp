#pragma once

#include <cstddef>
#include <functional>

namespace fairsemi {

/// Runs fn(i) for i in [0, n). With workers > 1 the iterations execute on a
/// small thread pool. Callers must write results to disjoint, preallocated
/// slots so the outcome is independent of scheduling. If iterations throw,
/// the exception from the lowest index is rethrown after all threads join.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace fairsemi
