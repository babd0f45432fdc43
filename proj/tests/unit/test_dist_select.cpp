#include <doctest.h>

#include <algorithm>
#include <vector>

#include "distres/dist_select.hpp"
#include "distres/oracle.hpp"

using namespace distres;

namespace {

using Locals = std::vector<std::vector<KeyedItem>>;

Locals two_pe() {
  return {{{1, 0, 0}, {4, 0, 1}, {7, 0, 2}}, {{2, 1, 3}, {5, 1, 4}, {8, 1, 5}}};
}

// Runs `fn` on every PE with its local reservoir; returns rank 0's result
// after checking that every PE agrees.
template <class Fn>
SelectionResult on_all(const Locals& locals, Fn&& fn, int threads = 1) {
  std::vector<SelectionResult> got(locals.size());
  run_spmd(
      static_cast<int>(locals.size()),
      [&](PeHandle& h) {
        const auto me = static_cast<std::size_t>(h.rank());
        const Reservoir r = Reservoir::from_sorted(locals[me]);
        Rng rng(9, 2 * me + 1);
        got[me] = fn(h, r, rng);
      },
      SpmdOptions{.threads = threads});
  for (const auto& g : got) REQUIRE(g == got[0]);
  return got[0];
}

Locals random_instance(Rng& gen, int p, std::uint64_t g) {
  Locals locals(static_cast<std::size_t>(p));
  const std::uint64_t distinct = std::max<std::uint64_t>(1, g / 3);
  for (std::uint64_t i = 0; i < g; ++i) {
    const auto pe = static_cast<std::uint32_t>(gen() % static_cast<std::uint64_t>(p));
    locals[pe].push_back({static_cast<double>(gen() % distinct), pe, i});
  }
  for (auto& l : locals) std::sort(l.begin(), l.end());
  return locals;
}

std::uint64_t count_le(const Locals& locals, const KeyedItem& x) {
  std::uint64_t c = 0;
  for (const auto& l : locals) c += std::upper_bound(l.begin(), l.end(), x) - l.begin();
  return c;
}

}  // namespace

TEST_CASE("exact selection on a small instance") {
  const auto res = on_all(two_pe(), [](PeHandle& h, const Reservoir& r, Rng& rng) {
    return select_exact(h, r, 3, 1, rng);
  });
  CHECK(res.threshold_element.key == 4.0);
  CHECK(res.achieved_rank == 3);
}

TEST_CASE("single PE selection equals local select") {
  Rng gen(1, 0);
  const Locals l = random_instance(gen, 1, 5000);
  const Reservoir ref = Reservoir::from_sorted(l[0]);
  for (std::uint64_t k : {1u, 17u, 2500u, 5000u}) {
    const auto res = on_all(l, [&](PeHandle& h, const Reservoir& r, Rng& rng) {
      return select_exact(h, r, k, 4, rng);
    });
    CHECK(res.threshold_element == ref.select(k));
  }
}

TEST_CASE("infeasible and malformed requests") {
  CHECK_THROWS_AS(on_all(two_pe(),
                         [](PeHandle& h, const Reservoir& r, Rng& rng) {
                           return select_exact(h, r, 7, 1, rng);
                         }),
                  InfeasibleRank);
  CHECK_THROWS_AS(on_all(two_pe(),
                         [](PeHandle& h, const Reservoir& r, Rng& rng) {
                           return select_range(h, r, {4, 2, 1}, rng);
                         }),
                  RangeError);
  CHECK_THROWS_AS(on_all(two_pe(),
                         [](PeHandle& h, const Reservoir& r, Rng& rng) {
                           return select_exact(h, r, 0, 1, rng);
                         }),
                  RangeError);
  CHECK_THROWS_AS(on_all(two_pe(),
                         [](PeHandle& h, const Reservoir& r, Rng&) {
                           std::vector<KeyedItem> kept;
                           return select_gather(h, r.to_vector(), 9, kept, 0);
                         }),
                  InfeasibleRank);
}

TEST_CASE("collapsed range equals exact selection") {
  const auto exact = on_all(two_pe(), [](PeHandle& h, const Reservoir& r, Rng& rng) {
    return select_exact(h, r, 3, 1, rng);
  });
  const auto range = on_all(two_pe(), [](PeHandle& h, const Reservoir& r, Rng& rng) {
    return select_range(h, r, {3, 3, 1}, rng);
  });
  CHECK(range.threshold_element == exact.threshold_element);
  CHECK(range.achieved_rank == 3);
}

TEST_CASE("range selection on a small instance") {
  const auto res = on_all(two_pe(), [](PeHandle& h, const Reservoir& r, Rng& rng) {
    return select_range(h, r, {2, 4, 1}, rng);
  });
  const double key = res.threshold_element.key;
  CHECK((key == 2.0 || key == 4.0 || key == 5.0));
  CHECK(res.achieved_rank == count_le(two_pe(), res.threshold_element));
  CHECK(res.achieved_rank >= 2);
  CHECK(res.achieved_rank <= 4);
}

TEST_CASE("gather selection keeps the prior sample at the root") {
  std::vector<KeyedItem> kept;
  std::vector<SelectionResult> second(2);
  run_spmd(2, [&](PeHandle& h) {
    const auto me = static_cast<std::size_t>(h.rank());
    const Locals l = two_pe();
    const CommCounters start = h.counters();
    const auto first = select_gather(h, l[me], 3, kept, 0);
    const CommCounters first_delta = h.counters() - start;
    if (h.rank() == 0) {
      CHECK(first.threshold_element.key == 4.0);
      CHECK(kept.size() == 3);
    }
    const CommCounters before = h.counters();
    second[me] = select_gather(h, std::span<const KeyedItem>{}, 3, kept, 0);
    const CommCounters delta = h.counters() - before;
    CHECK(delta.gathers == 1);
    // Only the three items of PE 1 travel in the first round (3 words each).
    CHECK(first_delta.words - delta.words == 9);
  });
  CHECK(second[0] == second[1]);
  CHECK(second[0].threshold_element.key == 4.0);
}

TEST_CASE("random instances agree with the merge oracle") {
  Rng gen(2, 0);
  double exact_rounds = 0;
  double range_rounds = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const int p = 1 + static_cast<int>(gen() % 16);
    const std::uint64_t g = 1 + gen() % 10000;
    const Locals l = random_instance(gen, p, g);
    const std::uint64_t k = 1 + gen() % g;
    const std::uint32_t d = 1 + static_cast<std::uint32_t>(gen() % 8);
    const KeyedItem expect = oracle::kth_of_merged(l, k);
    SelectOptions opt;
    opt.watch = &expect;
    const auto ex = on_all(
        l, [&](PeHandle& h, const Reservoir& r, Rng& rng) { return select_exact(h, r, k, d, rng, opt); },
        1 + inst % 3);
    REQUIRE(ex.threshold_element == expect);
    REQUIRE(ex.achieved_rank == k);

    const auto ga = on_all(l, [&](PeHandle& h, const Reservoir& r, Rng&) {
      std::vector<KeyedItem> kept;
      return select_gather(h, r.to_vector(), k, kept, 0);
    });
    REQUIRE(ga.threshold_element == expect);

    const std::uint64_t lo = std::max<std::uint64_t>(1, k / 2);
    const std::uint64_t hi = std::min(g, 2 * lo);
    const auto rg = on_all(l, [&](PeHandle& h, const Reservoir& r, Rng& rng) {
      return select_range(h, r, {lo, hi, d}, rng);
    });
    REQUIRE(rg.achieved_rank >= lo);
    REQUIRE(rg.achieved_rank <= hi);
    REQUIRE(rg.achieved_rank == count_le(l, rg.threshold_element));

    const auto ex_same = on_all(l, [&](PeHandle& h, const Reservoir& r, Rng& rng) {
      return select_exact(h, r, lo, d, rng);
    });
    exact_rounds += ex_same.rounds;
    range_rounds += rg.rounds;
  }
  CHECK(range_rounds < exact_rounds);
}

TEST_CASE("more pivots need fewer rounds") {
  Rng gen(3, 0);
  double rounds[2] = {0, 0};
  for (int inst = 0; inst < 100; ++inst) {
    const std::uint64_t g = 10000 + gen() % 20000;
    const Locals l = random_instance(gen, 8, g);
    const std::uint64_t k = g / 10;
    int i = 0;
    for (std::uint32_t d : {1u, 8u}) {
      rounds[i++] += on_all(l, [&](PeHandle& h, const Reservoir& r, Rng& rng) {
                       return select_exact(h, r, k, d, rng);
                     }).rounds;
    }
  }
  MESSAGE("mean rounds d=1 " << rounds[0] / 100 << ", d=8 " << rounds[1] / 100);
  CHECK(rounds[1] < rounds[0]);
}

TEST_CASE("a window that loses the answer is reported") {
  const KeyedItem wrong{6, 0, 99};
  SelectOptions opt;
  opt.watch = &wrong;
  CHECK_THROWS_AS(on_all(two_pe(),
                         [&](PeHandle& h, const Reservoir& r, Rng& rng) {
                           return select_exact(h, r, 3, 1, rng, opt);
                         }),
                  std::logic_error);
}
