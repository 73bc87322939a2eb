#ifndef AZINORM_PARALLEL_HPP_
#define AZINORM_PARALLEL_HPP_

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace azinorm {

// Runs fn(i) for i in [0, n) across `threads` workers in fixed contiguous
// chunks. Results must be written to per-index slots so the outcome is
// identical to the single-threaded run.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (n == 0) {
    return;
  }
  if (threads <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  const std::size_t n_workers = std::min<std::size_t>(threads, n);
  const std::size_t chunk = (n + n_workers - 1) / n_workers;
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(begin + chunk, n);
    if (begin >= end) {
      break;
    }
    pool.emplace_back([begin, end, &fn] {
      for (std::size_t i = begin; i < end; ++i) {
        fn(i);
      }
    });
  }
  for (std::thread& t : pool) {
    t.join();
  }
}

}  // namespace azinorm

#endif  // AZINORM_PARALLEL_HPP_
