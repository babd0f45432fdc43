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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "distres/keyed_item.hpp"
#include "distres/variates.hpp"

// Ground truth for the statistical tests. Nothing in here shares code with
// the sampling engine beyond the key formula used by reference_sample.

namespace distres::oracle {

inline constexpr std::size_t kMaxExactItems = 12;

/// Exact inclusion probabilities of weighted sampling without replacement
/// (successive draws proportional to the remaining weight).
struct InclusionTable {
  /// Per item, as reduced fractions "num/den".
  std::vector<std::string> exact;
  std::vector<double> probability;
  /// Probability of each k-subset, indexed by item bitmask; zero for masks
  /// of any other size.
  std::vector<double> subset_probability;
};

/// Enumerates all draw orders with rational arithmetic. n <= 12.
InclusionTable exact_inclusion(std::span<const double> weights, std::size_t k);

/// One-shot exponential-clocks sample: indices of the k smallest keys,
/// ascending by key.
std::vector<std::size_t> reference_sample(Rng& rng, std::span<const double> weights,
                                          std::size_t k);

/// k-th smallest (1-based) element of the union of the sequences.
KeyedItem kth_of_merged(const std::vector<std::vector<KeyedItem>>& locals,
                        std::size_t k);

/// Pearson goodness of fit of `observed` counts against `expected`
/// probabilities (which must sum to one) over `trials` draws. Bins with zero
/// expectation must be empty. Returns the p-value.
double chi_squared_gof(std::span<const std::uint64_t> observed,
                       std::span<const double> expected, std::uint64_t trials);

/// Homogeneity test of two count vectors over the same bins (2 x m
/// contingency table). Adjacent bins, in the given order, are pooled until
/// each pooled bin holds at least `min_bin_total` counts. Returns the
/// p-value.
double chi_squared_two_sample(std::span<const std::uint64_t> a,
                              std::span<const std::uint64_t> b,
                              std::uint64_t min_bin_total = 20);

/// Upper tail of the chi-squared distribution.
double chi_squared_sf(double statistic, double dof);

/// Kolmogorov-Smirnov distance between the empirical distribution of
/// `samples` and `cdf`.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);

}  // namespace distres::oracle
