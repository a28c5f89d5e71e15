#pragma once

#include <cstddef>
#include <functional>

namespace popeq {

/// Logical core count, at least 1.
unsigned default_jobs() noexcept;

/// Runs body(0) .. body(count - 1) on up to `jobs` threads. Indices are handed
/// out dynamically; callers write results by index, so the outcome does not
/// depend on scheduling. The first exception thrown is rethrown after all
/// workers finish.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body);

}  // namespace popeq
