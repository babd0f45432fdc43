#include <doctest.h>

#include <atomic>
#include <random>
#include <vector>

#include "distres/comm.hpp"

using distres::CommCounters;
using distres::KeyedItem;
using distres::PeHandle;
using distres::ProtocolViolation;
using distres::run_spmd;
namespace ops = distres::ops;

TEST_CASE("broadcast delivers the root value") {
  std::vector<int> got(4, -1);
  auto c = run_spmd(4, [&](PeHandle& h) {
    const int v = h.rank() == 2 ? 7 : 100 + h.rank();
    got[h.rank()] = h.broadcast(v, 2);
  });
  CHECK(got == std::vector<int>{7, 7, 7, 7});
  CHECK(c.broadcasts == 1);
  CHECK(c.words == 1);
}

TEST_CASE("single PE group is the identity") {
  int out = 0;
  run_spmd(1, [&](PeHandle& h) {
    out = h.broadcast(42, 0) + h.all_reduce(1, ops::Sum{});
    auto g = h.gather(std::vector<int>{5, 6}, 0);
    CHECK(g == std::vector<int>{5, 6});
  });
  CHECK(out == 43);
}

TEST_CASE("all_reduce sum, min, max and min-by-key") {
  run_spmd(4, [](PeHandle& h) {
    CHECK(h.all_reduce(h.rank() + 1, ops::Sum{}) == 10);
    CHECK(h.all_reduce(h.rank() + 1, ops::Min{}) == 1);
    CHECK(h.all_reduce(h.rank() + 1, ops::Max{}) == 4);
    // Same key everywhere: the tie goes to the lowest PE.
    KeyedItem mine{1.5, static_cast<std::uint32_t>(3 - h.rank()), 9};
    const KeyedItem best = h.all_reduce(mine, ops::MinByKey{});
    CHECK(best.origin_pe == 0);
  });
}

TEST_CASE("floating-point sum is the rank-ordered fold") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> d(-1e6, 1e6);
  std::vector<double> vals(13);
  for (auto& v : vals) v = d(gen);
  double fold = vals[0];
  for (std::size_t i = 1; i < vals.size(); ++i) fold += vals[i];
  for (int threads : {1, 3, 13}) {
    run_spmd(13, [&](PeHandle& h) {
      CHECK(h.all_reduce(vals[h.rank()], ops::Sum{}) == fold);
    }, {.threads = threads});
  }
}

TEST_CASE("element-wise vector all_reduce") {
  run_spmd(3, [](PeHandle& h) {
    std::vector<long> v{h.rank(), 10L * h.rank(), 1};
    auto s = h.all_reduce(v, ops::Sum{});
    CHECK(s == std::vector<long>{3, 30, 3});
  });
}

TEST_CASE("gather concatenates in rank order at the root") {
  auto c = run_spmd(3, [](PeHandle& h) {
    std::vector<char> mine;
    if (h.rank() == 0) mine = {'a'};
    if (h.rank() == 1) mine = {'b', 'c'};
    auto g = h.gather(mine, 1);
    if (h.rank() == 1) {
      CHECK(g == std::vector<char>{'a', 'b', 'c'});
    } else {
      CHECK(g.empty());
    }
    auto none = h.gather(std::vector<char>{}, 0);
    CHECK(none.empty());
  });
  CHECK(c.gathers == 2);
  CHECK(c.words == 1);  // only PE 0's byte travels to root 1
}

TEST_CASE("counters follow a scripted sequence") {
  run_spmd(4, [](PeHandle& h) {
    CHECK(h.counters() == CommCounters{});
    (void)h.broadcast(std::uint64_t{1}, 0);
    (void)h.all_reduce(std::vector<double>(5, 1.0), ops::Sum{});
    (void)h.gather(std::vector<std::uint64_t>(h.rank()), 3);
    const CommCounters c = h.counters();
    CHECK(c.broadcasts == 1);
    CHECK(c.all_reduces == 1);
    CHECK(c.gathers == 1);
    CHECK(c.words == 1 + 5 + (0 + 1 + 2));
  });
}

TEST_CASE("randomized broadcasts agree over many rounds") {
  for (int threads : {1, 4}) {
    std::vector<std::uint64_t> sums(8, 0);
    run_spmd(8, [&](PeHandle& h) {
      std::mt19937_64 gen(h.rank());
      for (int round = 0; round < 1000; ++round) {
        sums[h.rank()] += h.broadcast(gen(), round % 8);
      }
    }, {.threads = threads});
    for (auto s : sums) CHECK(s == sums[0]);
  }
}

TEST_CASE("skipping a collective is a protocol violation") {
  CHECK_THROWS_AS(run_spmd(3, [](PeHandle& h) {
    if (h.rank() != 1) (void)h.broadcast(1, 0);
  }), ProtocolViolation);

  CHECK_THROWS_AS(run_spmd(2, [](PeHandle& h) {
    if (h.rank() == 0) {
      (void)h.broadcast(1, 0);
    } else {
      (void)h.all_reduce(1, ops::Sum{});
    }
  }), ProtocolViolation);

  CHECK_THROWS_AS(run_spmd(2, [](PeHandle& h) {
    (void)h.broadcast(1, h.rank());
  }), ProtocolViolation);
}

TEST_CASE("a failing PE releases the others and its error wins") {
  for (int threads : {1, 2}) {
    CHECK_THROWS_AS(run_spmd(4, [](PeHandle& h) {
      if (h.rank() == 2) throw std::logic_error("boom");
      (void)h.broadcast(1, 0);
      (void)h.broadcast(1, 0);
    }, {.threads = threads}), std::logic_error);
  }
}

TEST_CASE("many PEs on few threads") {
  std::atomic<int> done{0};
  auto c = run_spmd(1024, [&](PeHandle& h) {
    const auto total = h.all_reduce(std::uint64_t{1}, ops::Sum{});
    CHECK(total == 1024);
    ++done;
  }, {.threads = 4, .stack_bytes = 64 * 1024});
  CHECK(done == 1024);
  CHECK(c.all_reduces == 1);
}

TEST_CASE("invalid arguments") {
  CHECK_THROWS_AS(run_spmd(0, [](PeHandle&) {}), distres::RangeError);
  CHECK_THROWS_AS(run_spmd(2, [](PeHandle& h) { (void)h.broadcast(1, 5); }),
                  distres::RangeError);
}
