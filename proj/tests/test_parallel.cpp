#include <atomic>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "specmc/parallel.hpp"

using namespace specmc;

TEST_CASE("for_blocks covers every index exactly once") {
  for (int workers : {1, 3, 8}) {
    ThreadPool pool(workers);
    CHECK(pool.workers() == workers);
    const std::int64_t n = 1000;
    std::vector<std::atomic<int>> hits(n);
    for (auto& h : hits) h = 0;
    pool.for_blocks(n, [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t i = b; i < e; ++i) ++hits[i];
    });
    for (std::int64_t i = 0; i < n; ++i) CHECK(hits[i] == 1);
  }
}

TEST_CASE("for_blocks edge sizes") {
  ThreadPool pool(4);
  int called = 0;
  pool.for_blocks(0, [&](std::int64_t, std::int64_t) { ++called; });
  CHECK(called == 0);

  // fewer items than workers: one block per item
  std::vector<int> hits(2, 0);
  pool.for_blocks(2, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t i = b; i < e; ++i) ++hits[i];
  });
  CHECK(hits[0] == 1);
  CHECK(hits[1] == 1);
}

TEST_CASE("slot-indexed writes reduce identically for any worker count") {
  const std::int64_t n = 4096;
  auto run = [n](int workers) {
    ThreadPool pool(workers);
    std::vector<double> slot(n);
    pool.for_blocks(n, [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t i = b; i < e; ++i)
        slot[i] = std::sin(static_cast<double>(i)) * 1e-3 + 1.0 / (1.0 + i);
    });
    double acc = 0.0;  // ordered post-join reduction
    for (std::int64_t i = 0; i < n; ++i) acc += slot[i];
    return acc;
  };
  const double r1 = run(1);
  CHECK(run(2) == r1);
  CHECK(run(5) == r1);
  CHECK(run(16) == r1);
}

TEST_CASE("pool survives repeated dispatch") {
  ThreadPool pool(3);
  std::int64_t total = 0;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<std::int64_t> slot(17, 0);
    pool.for_blocks(17, [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t i = b; i < e; ++i) slot[i] = i;
    });
    for (auto v : slot) total += v;
  }
  CHECK(total == 50 * (16 * 17 / 2));
}

TEST_CASE("hardware_workers is positive") { CHECK(ThreadPool::hardware_workers() >= 1); }
