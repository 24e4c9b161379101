#include "sdelab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sdelab {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SDELAB_WORKERS")) {
    int w = std::atoi(env);
    if (w > 0) return w;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& fn,
                  int workers) {
  if (count == 0) return;
  int w = resolve_workers(workers);
  if (w <= 1 || count == 1) {
    fn(0, count);
    return;
  }
  // Block size is a function of count alone, so the decomposition is the
  // same for every worker count.
  std::size_t block = std::max<std::size_t>(1, (count + 255) / 256);
  std::size_t nblocks = (count + block - 1) / block;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) break;
      std::size_t b = next.fetch_add(1);
      if (b >= nblocks) break;
      std::size_t lo = b * block;
      std::size_t hi = std::min(count, lo + block);
      try {
        fn(lo, hi);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        break;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(w) - 1);
  for (int i = 1; i < w; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace sdelab
