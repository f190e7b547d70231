#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace symentropy::detail {

/// Splits [begin, end) into up to `threads` contiguous chunks and runs
/// body(lo, hi) for each chunk on its own thread.
template <class Body>
void parallel_chunks(std::size_t begin, std::size_t end, unsigned threads, Body&& body) {
  if (end <= begin) return;
  const std::size_t n = end - begin;
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, n);
  if (workers == 1) {
    body(begin, end);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = begin + n * w / workers;
    const std::size_t hi = begin + n * (w + 1) / workers;
    pool.emplace_back([&body, &errors, lo, hi, w] {
      try {
        body(lo, hi);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// body(i) for every i in [begin, end); iterations must be independent.
template <class Body>
void parallel_for(std::size_t begin, std::size_t end, unsigned threads, Body&& body) {
  parallel_chunks(begin, end, threads, [&body](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) body(i);
  });
}

}  // namespace symentropy::detail
