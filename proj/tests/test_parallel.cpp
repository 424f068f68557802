#include <doctest.h>

#include <atomic>
#include <vector>

#include "convexburgers/parallel.hpp"

using namespace convexburgers;

TEST_CASE("parallel_for covers every index exactly once") {
  for (std::size_t threads : {1u, 2u, 3u, 8u}) {
    set_max_threads(threads);
    std::vector<std::atomic<int>> hits(101);
    parallel_for(hits.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) hits[i]++;
    });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
  set_max_threads(1);
}

TEST_CASE("empty range is a no-op") {
  bool called = false;
  parallel_for(0, [&](std::size_t, std::size_t) { called = true; });
  CHECK_FALSE(called);
}
