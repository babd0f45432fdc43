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

#include "distres/reservoir_stream.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "distres/skip_scan.hpp"

namespace distres {

namespace {

// Selected keys are floored at the smallest positive double.
double as_threshold(double key) {
  return std::max(key, std::numeric_limits<double>::denorm_min());
}

}  // namespace

void SamplerConfig::validate() const {
  if (selection == Selection::range) {
    if (k_lower < 1 || k_upper <= k_lower) {
      throw RangeError("range selection needs 1 <= k_lower < k_upper");
    }
  } else if (k < 1) {
    throw RangeError("sample size k must be at least 1");
  }
  if (pivots < 1) throw RangeError("pivot count must be at least 1");
}

DistributedSampler::DistributedSampler(const SamplerConfig& config, int rank)
    : config_(config),
      rank_(rank),
      key_rng_(config.seed, 2 * static_cast<std::uint64_t>(rank)),
      select_rng_(config.seed, 2 * static_cast<std::uint64_t>(rank) + 1) {
  config_.validate();
  if (rank < 0) throw RangeError("negative PE rank");
}

Threshold DistributedSampler::threshold() const {
  return threshold_ < 0.0 ? Threshold::unset() : Threshold::of(as_threshold(threshold_));
}

std::uint64_t DistributedSampler::local_fill_target() const {
  return config_.selection == Selection::range ? config_.k_upper : config_.k;
}

void DistributedSampler::insert_item(double key, std::uint64_t id) {
  reservoir_.insert(KeyedItem{key, static_cast<std::uint32_t>(rank_), id});
}

std::uint64_t DistributedSampler::insert_batch(BatchView batch,
                                               std::uint64_t& weight_reads) {
  if (threshold_ < 0.0) return insert_unset(batch, weight_reads);
  const double t = threshold_;
  auto on_insert = [&](std::size_t i, double key) { insert_item(key, batch.ids[i]); };
  const ScanStats st =
      config_.mode == Mode::weighted
          ? scan_weighted(key_rng_, batch.weights, t, config_.blocked_skip, on_insert)
          : scan_uniform(key_rng_, batch.ids.size(), t, on_insert);
  weight_reads += st.weight_reads;
  return st.inserted;
}

// Threshold unset: every item gets a key. On a large enough batch, once the
// local reservoir holds `target` items the key of local rank `target` acts
// as a local threshold, and the rest of the batch is skip-scanned against
// it, pruning back whenever the reservoir grows past the refresh mark.
std::uint64_t DistributedSampler::insert_unset(BatchView batch,
                                               std::uint64_t& weight_reads) {
  const bool weighted = config_.mode == Mode::weighted;
  const std::uint64_t target = local_fill_target();
  const std::size_t n = batch.ids.size();
  const std::uint64_t activate = std::max((3 * target + 1) / 2, target + 500);
  const std::uint64_t refresh = std::max((11 * target + 9) / 10, target + 250);
  const bool active = config_.local_threshold && n >= activate;

  double local_t = -1.0;
  auto refresh_local = [&] {
    if (active && reservoir_.size() >= target) {
      if (reservoir_.size() > target) reservoir_.truncate(target);
      local_t = as_threshold(reservoir_.max().key);
    }
  };

  std::uint64_t inserted = 0;
  std::size_t i = 0;
  refresh_local();
  for (; i < n && local_t < 0.0; ++i) {
    const double u = detail::draw(key_rng_);
    double key = u;
    if (weighted) {
      key = raw::exponential_key(u, batch.weights[i]);
      ++weight_reads;
    }
    insert_item(key, batch.ids[i]);
    ++inserted;
    refresh_local();
  }
  if (i == n) return inserted;

  auto on_insert = [&](std::size_t j, double key) {
    insert_item(key, batch.ids[i + j]);
    ++inserted;
    if (reservoir_.size() > refresh) refresh_local();
  };
  const ScanStats st =
      weighted ? scan_weighted(key_rng_, batch.weights.subspan(i), local_t,
                               config_.blocked_skip, on_insert)
               : scan_uniform(key_rng_, n - i, local_t, on_insert);
  weight_reads += st.weight_reads;
  return inserted;
}

void DistributedSampler::check_ids(BatchView batch) {
  for (std::uint64_t id : batch.ids) {
    if (seen_id_ && id <= last_id_) {
      throw InvariantViolation("PE " + std::to_string(rank_) + ": item id " +
                               std::to_string(id) + " does not increase");
    }
    last_id_ = id;
    seen_id_ = true;
  }
}

void DistributedSampler::check_key_bound() const {
  if (threshold_ < 0.0) return;
  const bool over = (!reservoir_.empty() && reservoir_.max().key > threshold_) ||
                    std::any_of(retained_.begin(), retained_.end(),
                                [&](const KeyedItem& x) { return x.key > threshold_; });
  if (over) {
    throw InvariantViolation("PE " + std::to_string(rank_) +
                             " holds a key above the threshold");
  }
}

BatchReport DistributedSampler::process_batch(PeHandle& h, BatchView batch) {
  const auto start = std::chrono::steady_clock::now();
  BatchReport rep;

  std::vector<double> kept_weights;
  std::vector<std::uint64_t> kept_ids;
  if (config_.mode == Mode::weighted) {
    if (batch.weights.size() != batch.ids.size()) {
      throw SizeError("batch weights and ids differ in length");
    }
    const auto bad = [](double w) { return !(w > 0.0) || !std::isfinite(w); };
    const auto first_bad = std::find_if(batch.weights.begin(), batch.weights.end(), bad);
    if (first_bad != batch.weights.end()) {
      if (config_.invalid_weights == InvalidWeightPolicy::reject) {
        const auto at = static_cast<std::size_t>(first_bad - batch.weights.begin());
        throw InvalidWeight("item " + std::to_string(batch.ids[at]) +
                            " has weight " + std::to_string(*first_bad));
      }
      for (std::size_t i = 0; i < batch.ids.size(); ++i) {
        if (bad(batch.weights[i])) {
          ++rep.skipped_invalid;
        } else {
          kept_weights.push_back(batch.weights[i]);
          kept_ids.push_back(batch.ids[i]);
        }
      }
      batch = BatchView{kept_weights, kept_ids};
    }
  } else if (!batch.weights.empty() && batch.weights.size() != batch.ids.size()) {
    throw SizeError("batch weights and ids differ in length");
  }
  if (config_.debug_checks) check_ids(batch);

  rep.scanned = batch.ids.size();
  rep.inserted = insert_batch(batch, rep.weight_reads);

  const std::array<std::uint64_t, 2> mine{reservoir_.size() + retained_.size(),
                                          rep.inserted};
  const std::vector<std::uint64_t> sums =
      h.all_reduce(std::span<const std::uint64_t>(mine), ops::Sum{});
  const std::uint64_t global = sums[0];
  rep.candidates = sums[1];

  const bool select = config_.selection == Selection::range
                          ? global > config_.k_upper
                          : global >= config_.k;
  if (select) {
    if (observer_) observer_(reservoir_);
    SelectionResult res;
    switch (config_.selection) {
      case Selection::exact:
        res = select_exact(h, reservoir_, config_.k, config_.pivots, select_rng_);
        break;
      case Selection::range:
        res = select_range(h, reservoir_,
                           {config_.k_lower, config_.k_upper, config_.pivots},
                           select_rng_);
        break;
      case Selection::gather: {
        std::vector<KeyedItem> cands = reservoir_.to_vector();
        if (cands.size() > config_.k) cands.resize(config_.k);
        res = select_gather(h, cands, config_.k, retained_, 0);
        reservoir_.clear();
        break;
      }
    }
    if (config_.selection != Selection::gather) {
      reservoir_ = reservoir_.split_at_probe(res.threshold_element).first;
    }
    threshold_ = as_threshold(res.threshold_element.key);
    rep.selected = true;
    rep.rounds = res.rounds;
    rep.sample_size = res.achieved_rank;
  } else {
    rep.sample_size = global;
  }
  rep.threshold = threshold();
  if (config_.debug_checks) check_key_bound();

  ++batches_;
  total_inserted_ += rep.inserted;
  rep.wall_ns = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::steady_clock::now() - start)
          .count());
  return rep;
}

BatchReport DistributedSampler::process_batch(PeHandle& h, std::span<const Item> batch) {
  std::vector<double> weights(batch.size());
  std::vector<std::uint64_t> ids(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    weights[i] = batch[i].weight;
    ids[i] = batch[i].id;
  }
  return process_batch(h, BatchView{weights, ids});
}

BatchReport DistributedSampler::process_batch_weighted(PeHandle& h, BatchView batch) {
  if (config_.mode != Mode::weighted || config_.selection == Selection::range) {
    throw RangeError("sampler is not configured for fixed-size weighted sampling");
  }
  return process_batch(h, batch);
}

BatchReport DistributedSampler::process_batch_uniform(PeHandle& h, BatchView batch) {
  if (config_.mode != Mode::uniform || config_.selection == Selection::range) {
    throw RangeError("sampler is not configured for fixed-size uniform sampling");
  }
  return process_batch(h, batch);
}

BatchReport DistributedSampler::process_batch_variable(PeHandle& h, BatchView batch) {
  if (config_.selection != Selection::range) {
    throw RangeError("sampler is not configured for variable-size sampling");
  }
  return process_batch(h, batch);
}

std::vector<KeyedItem> DistributedSampler::current_sample(PeHandle& h, int root) const {
  std::vector<KeyedItem> mine = reservoir_.to_vector();
  mine.insert(mine.end(), retained_.begin(), retained_.end());
  std::vector<KeyedItem> all = h.gather(std::span<const KeyedItem>(mine), root);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace distres
