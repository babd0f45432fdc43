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

#include "distres/workload.hpp"

#include <random>

#include "distres/errors.hpp"
#include "distres/variates.hpp"

namespace distres {

namespace {
// Keeps workload streams apart from the per-PE key and selection streams.
constexpr std::uint64_t kStreamBase = std::uint64_t{1} << 40;
}  // namespace

Workload::Workload(int p, std::uint64_t per_pe, WeightDist dist, std::uint64_t seed)
    : p_(p), b_(per_pe), dist_(dist), seed_(seed) {
  if (p < 1) throw RangeError("workload needs at least one PE");
}

void Workload::fill(std::uint64_t batch, int pe, std::vector<double>& weights,
                    std::vector<std::uint64_t>& ids) const {
  const auto upe = static_cast<std::uint64_t>(pe);
  const auto up = static_cast<std::uint64_t>(p_);
  Rng rng(seed_, kStreamBase + batch * up + upe);
  weights.resize(b_);
  ids.resize(b_);
  const std::uint64_t base = batch * b_ * up + upe * b_;
  for (std::uint64_t i = 0; i < b_; ++i) ids[i] = base + i;
  if (dist_ == WeightDist::uniform) {
    for (auto& w : weights) w = 100.0 * rng.next_unit();
    return;
  }
  std::normal_distribution<double> normal(
      50.0 + static_cast<double>(batch) + static_cast<double>(pe), 10.0);
  for (auto& w : weights) {
    do {
      w = normal(rng);
    } while (!(w > 0.0));
  }
}

}  // namespace distres
