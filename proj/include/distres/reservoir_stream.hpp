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
#include <functional>
#include <span>
#include <vector>

#include "distres/comm.hpp"
#include "distres/dist_select.hpp"
#include "distres/keyed_item.hpp"
#include "distres/ordered_reservoir.hpp"
#include "distres/variates.hpp"

// Distributed mini-batch reservoir sampler.
//
// Every PE owns one DistributedSampler and feeds it its share of each
// mini-batch; process_batch() is collective. While the global threshold is
// unset every item is inserted with a fresh key. Afterwards items are
// reached by skipping: only items whose key would fall below the threshold
// are touched. At the end of a batch the k globally smallest keys are
// selected, the threshold drops to the k-th key and larger keys are
// discarded everywhere.

namespace distres {

enum class Mode { weighted, uniform };

/// exact: fixed size k by distributed exact selection. range: variable size
/// in [k_lower, k_upper], selecting only on overflow. gather: fixed size k,
/// candidates shipped to rank 0 every batch.
enum class Selection { exact, range, gather };

enum class InvalidWeightPolicy { reject, skip };

struct SamplerConfig {
  Mode mode = Mode::weighted;
  Selection selection = Selection::exact;
  std::uint64_t k = 1;
  std::uint64_t k_lower = 0;
  std::uint64_t k_upper = 0;
  std::uint32_t pivots = 1;
  bool blocked_skip = true;
  bool local_threshold = true;
  InvalidWeightPolicy invalid_weights = InvalidWeightPolicy::reject;
  std::uint64_t seed = 1;
  /// Per-batch key-bound and id-order assertions.
  bool debug_checks = false;

  /// Throws RangeError on an inconsistent configuration.
  void validate() const;
};

struct Item {
  double weight = 1.0;
  std::uint64_t id = 0;
};

/// One PE's share of a mini-batch. `weights` may be empty in uniform mode.
struct BatchView {
  std::span<const double> weights;
  std::span<const std::uint64_t> ids;
};

struct BatchReport {
  /// Reservoir insertions on this PE, including ones pruned later.
  std::uint64_t inserted = 0;
  /// New candidates over all PEs.
  std::uint64_t candidates = 0;
  std::uint64_t scanned = 0;
  std::uint64_t weight_reads = 0;
  std::uint64_t skipped_invalid = 0;
  bool selected = false;
  std::uint32_t rounds = 0;
  Threshold threshold;
  /// Global sample size after the batch.
  std::uint64_t sample_size = 0;
  std::uint64_t wall_ns = 0;
};

class DistributedSampler {
 public:
  DistributedSampler(const SamplerConfig& config, int rank);

  /// Collective. Dispatches on the configured mode and selection.
  BatchReport process_batch(PeHandle& h, BatchView batch);
  BatchReport process_batch(PeHandle& h, std::span<const Item> batch);

  // Mode-checked entry points; each throws RangeError if the configuration
  // does not match.
  BatchReport process_batch_weighted(PeHandle& h, BatchView batch);
  BatchReport process_batch_uniform(PeHandle& h, BatchView batch);
  BatchReport process_batch_variable(PeHandle& h, BatchView batch);

  /// Collective gather of the global sample at `root`, ascending by key;
  /// empty on other PEs.
  std::vector<KeyedItem> current_sample(PeHandle& h, int root = 0) const;

  [[nodiscard]] Threshold threshold() const;
  [[nodiscard]] const Reservoir& reservoir() const { return reservoir_; }
  /// Coordinator-held sample in gather mode (rank 0 only).
  [[nodiscard]] const std::vector<KeyedItem>& retained() const { return retained_; }
  [[nodiscard]] const SamplerConfig& config() const { return config_; }
  [[nodiscard]] std::uint64_t batches() const { return batches_; }
  [[nodiscard]] std::uint64_t total_inserted() const { return total_inserted_; }

  /// Called on every PE right before a selection starts, with the local
  /// candidates.
  void set_selection_observer(std::function<void(const Reservoir&)> fn) {
    observer_ = std::move(fn);
  }

  /// Test hook: overwrite the local threshold value.
  void corrupt_threshold_for_testing(double value) { threshold_ = value; }

 private:
  std::uint64_t local_fill_target() const;
  std::uint64_t insert_batch(BatchView batch, std::uint64_t& weight_reads);
  std::uint64_t insert_unset(BatchView batch, std::uint64_t& weight_reads);
  void insert_item(double key, std::uint64_t id);
  void check_ids(BatchView batch);
  void check_key_bound() const;

  SamplerConfig config_;
  int rank_;
  Rng key_rng_;
  Rng select_rng_;
  Reservoir reservoir_;
  std::vector<KeyedItem> retained_;
  double threshold_ = -1.0;
  std::uint64_t batches_ = 0;
  std::uint64_t total_inserted_ = 0;
  std::uint64_t last_id_ = 0;
  bool seen_id_ = false;
  std::function<void(const Reservoir&)> observer_;
};

}  // namespace distres
