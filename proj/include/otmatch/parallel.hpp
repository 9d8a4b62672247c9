// parallel.hpp - static-partition parallel loop over an index range.
//
// Each index writes only its own outputs, so results do not depend on the
// thread count or schedule.
#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace otmatch {

template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, Fn&& fn, unsigned threads = 0) {
  if (end <= begin) return;
  const std::size_t count = end - begin;
  unsigned hw = threads != 0 ? threads : std::thread::hardware_concurrency();
  if (hw <= 1 || count < 4) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
    return;
  }
  hw = std::min<std::size_t>(hw, count);

  std::vector<std::thread> pool;
  pool.reserve(hw);
  std::exception_ptr first_error;
  std::mutex err_mutex;
  const std::size_t chunk = (count + hw - 1) / hw;
  for (unsigned t = 0; t < hw; ++t) {
    const std::size_t lo = begin + t * chunk;
    const std::size_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace otmatch
