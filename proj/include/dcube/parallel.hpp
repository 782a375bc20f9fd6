#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace dcube {

// Knobs shared by the enumeration engines.
struct EngineOptions {
  unsigned threads = 1;
  // Upper bound on the number of raw tuples an enumeration may generate.
  std::size_t max_tuples = std::size_t{1} << 23;
};

// Splits [0, n) into `workers` contiguous chunks and runs
// fn(worker, begin, end) on each. Chunk boundaries depend only on n and
// workers, and callers merge per-worker results in worker order, so output
// never depends on scheduling. Exceptions from workers are rethrown.
template <typename Fn>
void parallel_chunks(std::size_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1U, workers);
  if (n < workers) workers = static_cast<unsigned>(std::max<std::size_t>(n, 1));
  if (workers == 1) {
    fn(0U, std::size_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t begin = n * w / workers, end = n * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      try {
        fn(w, begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Number of workers parallel_chunks will actually use for n items.
inline unsigned effective_workers(std::size_t n, unsigned workers) {
  workers = std::max(1U, workers);
  if (n < workers) workers = static_cast<unsigned>(std::max<std::size_t>(n, 1));
  return workers;
}

}  // namespace dcube
