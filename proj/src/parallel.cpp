#include "capdisp/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace capdisp {

int worker_count() {
  if (const char* env = std::getenv("CAPDISP_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

void run_chunks(std::int64_t chunks, const std::function<void(std::int64_t)>& body) {
  if (chunks <= 0) return;
  int workers = worker_count();
  if (workers <= 1 || chunks == 1) {
    for (std::int64_t c = 0; c < chunks; ++c) body(c);
    return;
  }
  if (static_cast<std::int64_t>(workers) > chunks) workers = static_cast<int>(chunks);
  std::atomic<std::int64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::int64_t c = next.fetch_add(1);
        if (c >= chunks || failed.load()) return;
        try {
          body(c);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void parallel_for(std::int64_t n, std::int64_t grain, const std::function<void(std::int64_t)>& body) {
  if (n <= 0) return;
  if (grain < 1) grain = 1;
  std::int64_t chunks = (n + grain - 1) / grain;
  run_chunks(chunks, [&](std::int64_t c) {
    std::int64_t lo = c * grain;
    std::int64_t hi = lo + grain < n ? lo + grain : n;
    for (std::int64_t i = lo; i < hi; ++i) body(i);
  });
}

}  // namespace capdisp
