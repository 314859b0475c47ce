#ifndef QRES_PARALLEL_HPP
#define QRES_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace qres {

/// Worker count: QRES_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
unsigned worker_count();

/// Calls body(i) for every i in [0, n). Work is split into contiguous blocks;
/// callers write results by index so output order never depends on scheduling.
/// The first exception thrown by any worker is rethrown after all joins.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace qres

#endif  // QRES_PARALLEL_HPP
