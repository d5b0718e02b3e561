#include "orlicz_qha/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace oqha {

int thread_count() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("ORLICZ_QHA_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

void parallel_chunks(std::size_t count, std::size_t chunks,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  chunks = std::max<std::size_t>(1, std::min(chunks, count));
  const auto bounds = [&](std::size_t c) { return count * c / chunks; };
  const int workers = std::min<int>(thread_count(), static_cast<int>(chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(c, bounds(c), bounds(c + 1));
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto run = [&] {
    for (std::size_t c = next++; c < chunks; c = next++) {
      try {
        fn(c, bounds(c), bounds(c + 1));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace oqha
