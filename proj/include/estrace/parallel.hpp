#pragma once

#include <cstddef>
#include <functional>

namespace estrace {

/// Runs fn(0..n-1) on up to `jobs` threads (0 = hardware concurrency). Work
/// items are claimed in index order; the first exception by index is rethrown
/// after all threads finish. Results must be written to per-index slots.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

std::size_t resolve_jobs(std::size_t jobs);

}  // namespace estrace
