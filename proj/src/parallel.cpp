#include "convexburgers/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace convexburgers {
namespace {

std::size_t threads_from_env() {
  if (const char* env = std::getenv("SOLVER_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  return 1;
}

std::atomic<std::size_t>& thread_cap() {
  static std::atomic<std::size_t> cap{threads_from_env()};
  return cap;
}

}  // namespace

std::size_t max_threads() { return thread_cap().load(); }

void set_max_threads(std::size_t count) { thread_cap().store(std::max<std::size_t>(1, count)); }

void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body) {
  if (count == 0) return;
  const std::size_t chunks = std::min(max_threads(), count);
  if (chunks <= 1) {
    body(0, count);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(chunks - 1);
  const std::size_t base = count / chunks;
  const std::size_t extra = count % chunks;
  std::size_t begin = 0;
  std::size_t first_end = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t end = begin + base + (c < extra ? 1 : 0);
    if (c == 0) {
      first_end = end;
    } else {
      workers.emplace_back(body, begin, end);
    }
    begin = end;
  }
  body(0, first_end);
  for (auto& w : workers) w.join();
}

}  // namespace convexburgers
