#pragma once

#include <cstddef>
#include <functional>

namespace modecoupler {

// Worker count after applying the MODECOUPLER_THREADS environment cap.
// requested == 0 means "auto" (hardware concurrency); a positive
// MODECOUPLER_THREADS value caps the result, 0 or unset leaves it alone.
std::size_t resolve_thread_count(std::size_t requested);

// Runs body(i) for every i in [0, count).  Indices are partitioned into
// contiguous static blocks, one per worker, so the set of writes performed is
// identical to sequential execution regardless of scheduling.  The exception
// from the lowest-index failing block is rethrown on the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t threads = 0);

}  // namespace modecoupler
