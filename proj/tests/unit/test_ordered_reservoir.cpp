#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "distres/errors.hpp"
#include "distres/ordered_reservoir.hpp"

using distres::BasicReservoir;
using distres::KeyedItem;
using distres::Reservoir;

namespace {

KeyedItem item(double key, std::uint32_t pe = 0, std::uint64_t id = 0) {
  return KeyedItem{key, pe, id};
}

std::vector<double> keys_of(const std::vector<KeyedItem>& v) {
  std::vector<double> out;
  for (const auto& x : v) out.push_back(x.key);
  return out;
}

template <class R>
R build(const std::vector<double>& keys) {
  R r;
  std::uint64_t id = 0;
  for (double k : keys) r.insert(item(k, 0, id++));
  return r;
}

template <class R>
std::vector<KeyedItem> random_fill(R& r, std::mt19937_64& gen, std::size_t n) {
  std::vector<KeyedItem> oracle;
  std::uniform_int_distribution<int> key(0, static_cast<int>(n / 3 + 1));
  std::uniform_int_distribution<std::uint32_t> pe(0, 3);
  for (std::size_t i = 0; i < n; ++i) {
    KeyedItem x{static_cast<double>(key(gen)), pe(gen), i};
    r.insert(x);
    oracle.push_back(x);
  }
  std::sort(oracle.begin(), oracle.end());
  return oracle;
}

}  // namespace

TEST_CASE("insert keeps in-order traversal sorted") {
  auto r = build<Reservoir>({3, 1, 4, 1.5, 9});
  CHECK(keys_of(r.to_vector()) == std::vector<double>{1, 1.5, 3, 4, 9});
  CHECK(r.size() == 5);
  CHECK(r.check_invariants().empty());
}

TEST_CASE("equal keys order by origin pe") {
  Reservoir r;
  r.insert(item(2.0, 1, 7));
  r.insert(item(2.0, 0, 9));
  auto v = r.to_vector();
  REQUIRE(v.size() == 2);
  CHECK(v[0].origin_pe == 0);
  CHECK(v[1].origin_pe == 1);
}

TEST_CASE("select and rank on a small tree") {
  auto r = build<Reservoir>({3, 1, 4, 1.5, 9});
  CHECK(r.select(3).key == 3);
  CHECK(r.select(1).key == 1);
  CHECK(r.select(5).key == 9);
  CHECK(r.rank_of_key(3.5) == 3);
  CHECK(r.rank_of_key(0.5) == 0);
  CHECK(r.rank_of_key(3.0) == 2);
  CHECK(r.min().key == 1);
  CHECK(r.max().key == 9);
  CHECK_THROWS_AS((void)r.select(0), distres::RangeError);
  CHECK_THROWS_AS((void)r.select(6), distres::RangeError);
}

TEST_CASE("empty reservoir") {
  Reservoir r;
  CHECK(r.size() == 0);
  CHECK(r.empty());
  CHECK_THROWS_AS((void)r.min(), distres::RangeError);
  CHECK_THROWS_AS((void)r.max(), distres::RangeError);
  CHECK(r.rank_of_key(1.0) == 0);
  auto [a, b] = r.split_at_rank(0);
  CHECK(a.empty());
  CHECK(b.empty());
  CHECK(r.check_invariants().empty());
}

TEST_CASE("split at rank on a small tree") {
  auto r = build<Reservoir>({3, 1, 4, 1.5, 9});
  auto [l, rt] = r.split_at_rank(2);
  CHECK(keys_of(l.to_vector()) == std::vector<double>{1, 1.5});
  CHECK(keys_of(rt.to_vector()) == std::vector<double>{3, 4, 9});

  auto r2 = build<Reservoir>({3, 1, 4, 1.5, 9});
  auto [none, all] = r2.split_at_rank(0);
  CHECK(none.empty());
  CHECK(all.size() == 5);

  auto r3 = build<Reservoir>({3, 1, 4, 1.5, 9});
  auto [all3, none3] = r3.split_at_rank(5);
  CHECK(all3.size() == 5);
  CHECK(none3.empty());

  auto r4 = build<Reservoir>({3, 1});
  CHECK_THROWS_AS((void)r4.split_at_rank(3), distres::RangeError);
}

TEST_CASE("split at probe includes elements equal to the probe") {
  auto r = build<Reservoir>({3, 1, 4, 1.5, 9});
  const KeyedItem third = r.select(3);
  auto [l, rt] = r.split_at_probe(third);
  CHECK(keys_of(l.to_vector()) == std::vector<double>{1, 1.5, 3});
  CHECK(keys_of(rt.to_vector()) == std::vector<double>{4, 9});

  auto low = build<Reservoir>({3, 1, 4});
  auto [a, b] = low.split_at_probe(item(0.5));
  CHECK(a.empty());
  CHECK(b.size() == 3);

  auto high = build<Reservoir>({3, 1, 4});
  auto [c, d] = high.split_at_probe(item(100.0));
  CHECK(c.size() == 3);
  CHECK(d.empty());
}

TEST_CASE("from_sorted rejects unsorted input") {
  std::vector<KeyedItem> v{item(2), item(1)};
  CHECK_THROWS_AS(Reservoir::from_sorted(v), distres::RangeError);
  std::vector<KeyedItem> w{item(1), item(2), item(3)};
  auto r = Reservoir::from_sorted(w);
  CHECK(r.to_vector() == w);
  CHECK(r.check_invariants().empty());
}

TEST_CASE_TEMPLATE("random inserts match a sorted oracle", R, BasicReservoir<4>,
                   BasicReservoir<5>, BasicReservoir<16>) {
  std::mt19937_64 gen(11);
  R r;
  auto oracle = random_fill(r, gen, 10000);
  CHECK(r.check_invariants().empty());
  CHECK(r.to_vector() == oracle);
  for (std::size_t i = 1; i <= oracle.size(); ++i) {
    const KeyedItem& s = r.select(i);
    REQUIRE(s == oracle[i - 1]);
    REQUIRE(r.rank_of(s) == i - 1);
    REQUIRE(r.count_le(s) == i);
  }
  std::uniform_real_distribution<double> probe(-1.0, 4000.0);
  for (int q = 0; q < 1000; ++q) {
    const double key = probe(gen);
    const auto expect = static_cast<std::size_t>(
        std::lower_bound(oracle.begin(), oracle.end(), key,
                         [](const KeyedItem& a, double k) { return a.key < k; }) -
        oracle.begin());
    REQUIRE(r.rank_of_key(key) == expect);
  }
}

TEST_CASE_TEMPLATE("random splits preserve contents and structure", R,
                   BasicReservoir<4>, BasicReservoir<5>, BasicReservoir<16>) {
  std::mt19937_64 gen(29);
  for (int round = 0; round < 1000; ++round) {
    const std::size_t n =
        std::uniform_int_distribution<std::size_t>(0, round < 500 ? 60 : 3000)(gen);
    R r;
    auto oracle = random_fill(r, gen, n);
    const std::size_t at = std::uniform_int_distribution<std::size_t>(0, n)(gen);
    auto [l, rt] = r.split_at_rank(at);
    REQUIRE(r.empty());
    INFO("n=" << n << " at=" << at);
    REQUIRE(l.check_invariants() == "");
    REQUIRE(rt.check_invariants() == "");
    REQUIRE(l.size() == at);
    REQUIRE(rt.size() == n - at);
    auto lv = l.to_vector();
    auto rv = rt.to_vector();
    lv.insert(lv.end(), rv.begin(), rv.end());
    REQUIRE(lv == oracle);

    // The pieces stay usable.
    l.insert(item(-1.0, 9, 9));
    rt.insert(item(1e9, 9, 9));
    REQUIRE(l.check_invariants() == "");
    REQUIRE(rt.check_invariants() == "");
  }
}

TEST_CASE_TEMPLATE("repeated truncation interleaved with inserts", R,
                   BasicReservoir<4>, BasicReservoir<16>) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> key(0.0, 1.0);
  R r;
  std::vector<KeyedItem> oracle;
  std::uint64_t id = 0;
  for (int step = 0; step < 300; ++step) {
    for (int i = 0; i < 200; ++i) {
      KeyedItem x{key(gen), 0, id++};
      r.insert(x);
      oracle.push_back(x);
    }
    std::sort(oracle.begin(), oracle.end());
    const std::size_t keep =
        std::uniform_int_distribution<std::size_t>(0, oracle.size())(gen);
    r.truncate(keep);
    oracle.resize(keep);
    REQUIRE(r.check_invariants() == "");
    REQUIRE(r.to_vector() == oracle);
  }
}

TEST_CASE("copy and move") {
  auto r = build<Reservoir>({5, 2, 8, 1});
  Reservoir c = r;
  CHECK(c.to_vector() == r.to_vector());
  Reservoir m = std::move(c);
  CHECK(m.size() == 4);
  CHECK(m.check_invariants().empty());
}

TEST_CASE("node visits grow logarithmically") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> key(0.0, 1.0);
  std::vector<double> query_cost;
  std::vector<double> split_cost;
  for (int e = 10; e <= 20; ++e) {
    const std::size_t n = std::size_t{1} << e;
    std::vector<KeyedItem> items(n);
    for (std::size_t i = 0; i < n; ++i) items[i] = KeyedItem{key(gen), 0, i};
    std::sort(items.begin(), items.end());
    auto r = Reservoir::from_sorted(items);
    r.reset_node_visits();
    const int ops = 2000;
    for (int q = 0; q < ops; ++q) {
      const std::size_t rank = 1 + gen() % n;
      (void)r.select(rank);
      (void)r.rank_of(items[rank - 1]);
      r.insert(KeyedItem{key(gen), 1, static_cast<std::uint64_t>(q)});
    }
    query_cost.push_back(static_cast<double>(r.node_visits()) / (3.0 * ops));

    double split_total = 0;
    for (int q = 0; q < 20; ++q) {
      auto copy = Reservoir::from_sorted(items);
      auto [a, b] = copy.split_at_rank(1 + gen() % (n - 1));
      split_total += static_cast<double>(a.node_visits());
    }
    split_cost.push_back(split_total / 20.0);
  }
  for (std::size_t i = 1; i < query_cost.size(); ++i) {
    INFO("size 2^" << (10 + i));
    CHECK(query_cost[i] - query_cost[i - 1] <= 1.5);
    CHECK(split_cost[i] - split_cost[i - 1] <= 4.0);
  }
}
