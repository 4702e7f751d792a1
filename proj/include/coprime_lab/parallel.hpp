#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "coprime_lab/rational.hpp"

namespace coprime_lab {

// Worker cap from COPRIME_LAB_THREADS, otherwise the hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("COPRIME_LAB_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Splits [begin, end) into contiguous chunks, sums chunk(lo, hi) over them.
// Integer partial sums make the result independent of the worker count.
template <class Chunk>
uint128 parallel_sum(std::uint64_t begin, std::uint64_t end, Chunk chunk, unsigned workers = worker_count()) {
  if (end <= begin) return 0;
  const std::uint64_t span = end - begin;
  workers = static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, workers), span));
  if (workers == 1) return chunk(begin, end);

  std::vector<uint128> partial(workers, 0);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t lo = begin + span * w / workers;
    const std::uint64_t hi = begin + span * (w + 1) / workers;
    threads.emplace_back([&, w, lo, hi] {
      try {
        partial[w] = chunk(lo, hi);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  uint128 total = 0;
  for (const auto v : partial) total = detail::checked_add(total, v);
  return total;
}

}  // namespace coprime_lab
