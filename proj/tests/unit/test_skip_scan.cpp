#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "distres/skip_scan.hpp"

using namespace distres;

TEST_CASE("weighted scan inserts each item with probability 1 - exp(-T w)") {
  const std::vector<double> w{0.5, 1.0, 2.0, 4.0, 0.25, 8.0, 1.5, 3.0};
  const double t = 0.2;
  constexpr int runs = 200000;
  for (bool blocked : {false, true}) {
    std::vector<int> hits(w.size(), 0);
    Rng rng(21, blocked ? 1 : 0);
    double key_bound = 0;
    for (int r = 0; r < runs; ++r) {
      scan_weighted(rng, w, t, blocked, [&](std::size_t i, double key) {
        ++hits[i];
        key_bound = std::max(key_bound, key);
      });
    }
    CHECK(key_bound < t);
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double pi = 1.0 - std::exp(-t * w[i]);
      const double se = std::sqrt(pi * (1 - pi) / runs);
      CAPTURE(i);
      CHECK(std::abs(hits[i] / double(runs) - pi) < 4 * se);
    }
  }
}

TEST_CASE("blocked and scalar scans agree on integer weights") {
  Rng gen(1, 77);
  for (int s = 0; s < 50; ++s) {
    std::vector<double> w(1000 + gen() % 3000);
    for (auto& x : w) x = static_cast<double>(1 + gen() % 1000);
    const double t = 1e-4;
    std::vector<std::pair<std::size_t, double>> a;
    std::vector<std::pair<std::size_t, double>> b;
    Rng r1(2, s);
    Rng r2(2, s);
    const ScanStats sa =
        scan_weighted(r1, w, t, true, [&](std::size_t i, double k) { a.emplace_back(i, k); });
    const ScanStats sb =
        scan_weighted(r2, w, t, false, [&](std::size_t i, double k) { b.emplace_back(i, k); });
    REQUIRE(a == b);
    CHECK(sa.inserted == sb.inserted);
    CHECK(sa.weight_reads >= sb.weight_reads);
  }
}

TEST_CASE("threshold lowered by the callback applies to the next skip") {
  const std::vector<double> w(10000, 1.0);
  double t = 1.0;
  Rng rng(4, 0);
  std::size_t count = 0;
  scan_weighted(rng, w, t, false, [&](std::size_t, double key) {
    CHECK(key < t);
    ++count;
    t = 1e-9;
  });
  CHECK(count >= 1);
  CHECK(count <= 2);
}

TEST_CASE("uniform scan inserts a binomial number of items") {
  const std::size_t m = 100000;
  const double t = 0.5;
  Rng rng(5, 0);
  std::size_t last = 0;
  bool increasing = true;
  bool bounded = true;
  bool first = true;
  const ScanStats st = scan_uniform(rng, m, t, [&](std::size_t i, double key) {
    increasing = increasing && (first || i > last);
    bounded = bounded && key > 0.0 && key <= t && i < m;
    first = false;
    last = i;
  });
  CHECK(increasing);
  CHECK(bounded);
  CHECK(st.weight_reads == 0);
  CHECK(std::abs(static_cast<double>(st.inserted) - m * t) <= 3 * std::sqrt(m * t * (1 - t)));
}

TEST_CASE("uniform scan with threshold one inserts everything") {
  double t = 1.0;
  Rng rng(6, 0);
  std::vector<std::size_t> seen;
  scan_uniform(rng, 10, t, [&](std::size_t i, double) { seen.push_back(i); });
  CHECK(seen == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
}

TEST_CASE("empty batches") {
  Rng rng(7, 0);
  int calls = 0;
  const ScanStats a =
      scan_weighted(rng, std::span<const double>{}, 1.0, true, [&](std::size_t, double) { ++calls; });
  const ScanStats b = scan_uniform(rng, 0, 0.5, [&](std::size_t, double) { ++calls; });
  CHECK(calls == 0);
  CHECK(a.weight_reads == 0);
  CHECK(b.inserted == 0);
}
