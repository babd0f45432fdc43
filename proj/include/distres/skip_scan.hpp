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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "distres/simd/block_sum.hpp"
#include "distres/variates.hpp"

// Skip-based scans over one local mini-batch. Both loops read the threshold
// through a reference before every skip draw, so an insertion callback may
// lower it mid-batch. Whatever skip is left at the end of the batch is
// dropped; the next batch starts with a fresh draw.

namespace distres {

struct ScanStats {
  std::uint64_t inserted = 0;
  std::uint64_t weight_reads = 0;
};

/// Weighted scan. `insert(index, key)` is called for every item whose
/// exponential clock beats the threshold; keys are drawn conditioned on
/// lying below the threshold that was current for the skip.
template <UnitSource S, class Insert>
ScanStats scan_weighted(S& rng, std::span<const double> weights,
                        const double& threshold, bool blocked,
                        Insert&& insert) {
  ScanStats st;
  const std::size_t n = weights.size();
  const double* w = weights.data();
  const simd::BlockSumFn block = blocked ? simd::block_sum() : nullptr;
  std::size_t j = 0;
  while (j < n) {
    const double t = threshold;
    double x = raw::weighted_skip(detail::draw(rng), t);
    if (block != nullptr) {
      while (j + simd::kBlock <= n) {
        const double s = block(w + j);
        st.weight_reads += simd::kBlock;
        if (!(x - s > 0.0)) break;
        x -= s;
        j += simd::kBlock;
      }
    }
    const std::size_t from = j;
    bool hit = false;
    while (j < n) {
      x -= w[j++];
      if (!(x > 0.0)) {
        hit = true;
        break;
      }
    }
    st.weight_reads += j - from;
    if (!hit) break;
    const std::size_t idx = j - 1;
    insert(idx, raw::constrained_key(detail::draw(rng), w[idx], t));
    ++st.inserted;
  }
  return st;
}

/// Uniform scan over n items. Never touches weights: skips are geometric in
/// the item count and keys are uniform below the threshold.
template <UnitSource S, class Insert>
ScanStats scan_uniform(S& rng, std::size_t n, const double& threshold,
                       Insert&& insert) {
  ScanStats st;
  std::size_t j = 0;
  while (j < n) {
    const double t = threshold;
    const std::uint64_t x = raw::uniform_skip(detail::draw(rng), t);
    if (x >= n - j) break;
    j += static_cast<std::size_t>(x);
    insert(j, raw::uniform_constrained_key(detail::draw(rng), t));
    ++st.inserted;
    ++j;
  }
  return st;
}

}  // namespace distres
