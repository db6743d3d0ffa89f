#pragma once

#include <cstddef>
#include <functional>

namespace degpar {

/// Caps the number of worker threads used by parallel_for (n >= 1).
void set_thread_count(int n);
int thread_count();

/// Runs fn(i) for i in [begin, end) on up to thread_count() threads in
/// contiguous chunks. Exceptions from workers are rethrown (first one wins).
void parallel_for(std::ptrdiff_t begin, std::ptrdiff_t end, const std::function<void(std::ptrdiff_t)>& fn);

}  // namespace degpar
