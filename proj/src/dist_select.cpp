/*
 * Copyright 2026 The distres Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "distres/dist_select.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace distres {

namespace {

// Candidates still in play: local ranks [lo, hi), `below` elements already
// known to rank under the window, n elements in the window globally. Target
// ranks a..b are relative to the window.
struct Window {
  std::size_t lo = 0;
  std::size_t hi = 0;
  std::uint64_t below = 0;
  std::uint64_t n = 0;
  std::uint64_t a = 0;
  std::uint64_t b = 0;
};

struct Answer {
  KeyedItem element;
  std::uint64_t rank = 0;
  std::uint32_t ok = 0;
};

// Sampling rate whose sample minimum has a rank in [a, b] with reasonable
// probability: 1/a for a point target, ln(b/a)/(b-a) for a range.
double sample_rate(std::uint64_t a, std::uint64_t b) {
  if (a == b) return 1.0 / static_cast<double>(a);
  const double da = static_cast<double>(a);
  const double db = static_cast<double>(b);
  return std::log(db / da) / (db - da);
}

std::size_t clamp_rank(std::size_t r, const Window& w) {
  return std::clamp(r, w.lo, w.hi);
}

void check_watch(const PeHandle& h, const Reservoir& r, const Window& w,
                 const KeyedItem* watch) {
  if (watch == nullptr || watch->origin_pe != static_cast<std::uint32_t>(h.rank())) {
    return;
  }
  const std::size_t pos = r.rank_of(*watch);
  if (pos < w.lo || pos >= w.hi || !(r.select(pos + 1) == *watch)) {
    throw std::logic_error("selection window lost the target element");
  }
}

SelectionResult base_case(PeHandle& h, const Reservoir& r, const Window& w,
                          std::uint32_t rounds) {
  std::vector<KeyedItem> mine;
  mine.reserve(w.hi - w.lo);
  for (std::size_t i = w.lo; i < w.hi; ++i) mine.push_back(r.select(i + 1));
  std::vector<KeyedItem> all = h.gather(std::span<const KeyedItem>(mine), 0);
  Answer ans;
  if (h.rank() == 0) {
    const auto nth = all.begin() + static_cast<std::ptrdiff_t>(w.a - 1);
    std::nth_element(all.begin(), nth, all.end());
    ans = Answer{*nth, w.below + w.a, 1};
  }
  ans = h.broadcast(ans, 0);
  return {ans.element, ans.rank, rounds};
}

SelectionResult select_window(PeHandle& h, const Reservoir& r,
                              std::uint64_t lower, std::uint64_t upper,
                              std::uint32_t d, Rng& rng,
                              const SelectOptions& options) {
  if (lower < 1 || upper < lower) {
    throw RangeError("selection needs 1 <= lower_rank <= upper_rank");
  }
  if (d < 1) throw RangeError("selection needs at least one pivot");

  Window w;
  w.hi = r.size();
  w.n = h.all_reduce(static_cast<std::uint64_t>(r.size()), ops::Sum{});
  if (lower > w.n) {
    throw InfeasibleRank("rank " + std::to_string(lower) + " requested from " +
                         std::to_string(w.n) + " candidates");
  }
  w.a = lower;
  w.b = std::min(upper, w.n);

  const std::uint64_t cutoff = options.base_case_per_pivot * d;
  std::uint32_t rounds = 0;
  std::vector<KeyedItem> sample(d + 1);
  std::vector<KeyedItem> pivots;
  std::vector<std::uint64_t> le;
  while (true) {
    check_watch(h, r, w, options.watch);
    ++rounds;
    if (w.n <= cutoff) return base_case(h, r, w, rounds);

    // Sample from the side nearer the target.
    const bool top = w.a + w.b > w.n;
    const double q = top ? sample_rate(w.n - w.b + 1, w.n - w.a + 1)
                         : sample_rate(w.a, w.b);
    const std::size_t local = w.hi - w.lo;
    const KeyedItem none = top ? KeyedItem::sentinel_low() : KeyedItem::sentinel_high();
    for (std::uint32_t j = 0; j < d; ++j) {
      const std::uint64_t g = raw::uniform_skip(detail::draw(rng), q);
      if (g < local) {
        sample[j] = top ? r.select(w.hi - g) : r.select(w.lo + g + 1);
      } else {
        sample[j] = none;
      }
    }
    sample[d] = local == 0 ? none : (top ? r.select(w.hi) : r.select(w.lo + 1));
    const std::vector<KeyedItem> best =
        top ? h.all_reduce(std::span<const KeyedItem>(sample), ops::Max{})
            : h.all_reduce(std::span<const KeyedItem>(sample), ops::Min{});

    pivots.clear();
    for (std::uint32_t j = 0; j < d; ++j) {
      if (!best[j].is_sentinel()) pivots.push_back(best[j]);
    }
    if (pivots.empty()) pivots.push_back(best[d]);
    std::sort(pivots.begin(), pivots.end());
    pivots.erase(std::unique(pivots.begin(), pivots.end()), pivots.end());

    le.resize(pivots.size());
    for (std::size_t j = 0; j < pivots.size(); ++j) {
      le[j] = clamp_rank(r.count_le(pivots[j]), w) - w.lo;
    }
    const std::vector<std::uint64_t> c =
        h.all_reduce(std::span<const std::uint64_t>(le), ops::Sum{});

    for (std::size_t j = 0; j < pivots.size(); ++j) {
      if (c[j] >= w.a && c[j] <= w.b) {
        return {pivots[j], w.below + c[j], rounds};
      }
    }

    // Keep the segment between the last pivot below the target and the
    // first one above it.
    std::uint64_t drop_low = 0;
    std::uint64_t keep_high = w.n;
    std::size_t lo = w.lo;
    std::size_t hi = w.hi;
    for (std::size_t j = 0; j < pivots.size(); ++j) {
      if (c[j] < w.a) {
        drop_low = c[j];
        lo = clamp_rank(r.count_le(pivots[j]), w);
      } else if (c[j] > w.b) {
        keep_high = c[j] - 1;
        hi = clamp_rank(r.rank_of(pivots[j]), w);
        break;
      }
    }
    w.lo = lo;
    w.hi = hi;
    w.below += drop_low;
    w.a -= drop_low;
    w.b -= drop_low;
    w.n = keep_high - drop_low;
  }
}

}  // namespace

SelectionResult select_exact(PeHandle& h, const Reservoir& local,
                             std::uint64_t k, std::uint32_t pivots, Rng& rng,
                             const SelectOptions& options) {
  return select_window(h, local, k, k, pivots, rng, options);
}

SelectionResult select_range(PeHandle& h, const Reservoir& local,
                             const SelectionSpec& spec, Rng& rng,
                             const SelectOptions& options) {
  return select_window(h, local, spec.lower_rank, spec.upper_rank, spec.pivots,
                       rng, options);
}

SelectionResult select_gather(PeHandle& h, std::span<const KeyedItem> candidates,
                              std::uint64_t k, std::vector<KeyedItem>& retained,
                              int root) {
  if (k < 1) throw RangeError("selection needs k >= 1");
  std::vector<KeyedItem> got = h.gather(candidates, root);
  Answer ans;
  if (h.rank() == root) {
    retained.insert(retained.end(), got.begin(), got.end());
    ans.rank = retained.size();
    if (retained.size() >= k) {
      const auto nth = retained.begin() + static_cast<std::ptrdiff_t>(k - 1);
      std::nth_element(retained.begin(), nth, retained.end());
      retained.resize(k);
      ans = Answer{retained.back(), k, 1};
    }
  }
  ans = h.broadcast(ans, root);
  if (ans.ok == 0) {
    throw InfeasibleRank("rank " + std::to_string(k) + " requested from " +
                         std::to_string(ans.rank) + " candidates");
  }
  return {ans.element, ans.rank, 1};
}

}  // namespace distres
