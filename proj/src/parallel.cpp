#include "degpar/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace degpar {

namespace {

std::atomic<int>& threads() {
  static std::atomic<int> n{static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))};
  return n;
}

}  // namespace

void set_thread_count(int n) {
  if (n < 1) throw std::invalid_argument("thread count must be >= 1");
  threads() = n;
}

int thread_count() { return threads(); }

void parallel_for(std::ptrdiff_t begin, std::ptrdiff_t end, const std::function<void(std::ptrdiff_t)>& fn) {
  const std::ptrdiff_t n = end - begin;
  if (n <= 0) return;
  const std::ptrdiff_t workers = std::min<std::ptrdiff_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::ptrdiff_t i = begin; i < end; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  const std::ptrdiff_t chunk = (n + workers - 1) / workers;
  for (std::ptrdiff_t w = 0; w < workers; ++w) {
    const std::ptrdiff_t lo = begin + w * chunk;
    const std::ptrdiff_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::ptrdiff_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace degpar
