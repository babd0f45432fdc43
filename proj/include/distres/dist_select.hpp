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

#include <cstdint>
#include <span>
#include <vector>

#include "distres/comm.hpp"
#include "distres/keyed_item.hpp"
#include "distres/ordered_reservoir.hpp"
#include "distres/variates.hpp"

namespace distres {

/// Target rank window [lower_rank, upper_rank] (1-based, global) and the
/// number of pivots drawn per round.
struct SelectionSpec {
  std::uint64_t lower_rank = 1;
  std::uint64_t upper_rank = 1;
  std::uint32_t pivots = 1;
};

struct SelectionResult {
  KeyedItem threshold_element;
  /// Number of elements <= threshold_element across all PEs.
  std::uint64_t achieved_rank = 0;
  std::uint32_t rounds = 0;

  friend bool operator==(const SelectionResult&, const SelectionResult&) = default;
};

struct SelectOptions {
  /// Window size at or below which the candidates are gathered to rank 0
  /// and solved sequentially; scaled by the pivot count.
  std::uint64_t base_case_per_pivot = 64;
  /// Debug aid: when set, every PE asserts after each round that this
  /// element (if it is local) is still inside its candidate window.
  const KeyedItem* watch = nullptr;
};

/// Element of exact global rank k. Collective; every PE gets the same
/// result. `rng` drives pivot sampling and must be per-PE.
SelectionResult select_exact(PeHandle& h, const Reservoir& local,
                             std::uint64_t k, std::uint32_t pivots, Rng& rng,
                             const SelectOptions& options = {});

/// Any element whose global rank lies in [spec.lower_rank, spec.upper_rank];
/// stops as soon as a pivot lands in that window.
SelectionResult select_range(PeHandle& h, const Reservoir& local,
                             const SelectionSpec& spec, Rng& rng,
                             const SelectOptions& options = {});

/// Centralized baseline. Every PE ships `candidates` to `root`, which merges
/// them with `retained`, keeps the k smallest there and broadcasts the k-th.
/// `retained` is only read and written on the root.
SelectionResult select_gather(PeHandle& h, std::span<const KeyedItem> candidates,
                              std::uint64_t k, std::vector<KeyedItem>& retained,
                              int root = 0);

}  // namespace distres
