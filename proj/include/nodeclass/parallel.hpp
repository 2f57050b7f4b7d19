#pragma once

#include <cstddef>
#include <functional>

namespace nodeclass {

// Process-wide bound on worker threads for parallel sections. 0 selects the
// hardware concurrency. Results never depend on this value.
void set_max_jobs(unsigned jobs);
unsigned max_jobs();

// Runs body(i) for i in [0, count). Work items are claimed dynamically; callers
// write results into per-index slots. Nested calls run serially on the calling
// thread. The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace nodeclass
