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
#include <string>
#include <vector>

// The acceptance battery. Each criterion is a self-contained experiment
// checked against the oracles; `full` selects the published problem sizes,
// otherwise a reduced configuration that finishes in seconds.

namespace distres::validation {

struct Options {
  bool full = false;
  std::uint64_t seed = 20261016;
  int threads = 1;
  /// Corrupts the sampler threshold mid-run; the invariant criterion must
  /// then fail.
  bool inject_threshold_fault = false;
  /// Criteria to run (1-based); empty runs all.
  std::vector<int> only;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

inline constexpr int kCriteria = 11;

CriterionResult run_criterion(int id, const Options& options);

/// Runs the selected criteria in order, reporting each as it finishes.
std::vector<CriterionResult> run_all(
    const Options& options,
    const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS [3] title: detail (1.2 s)"
std::string format(const CriterionResult& r);

}  // namespace distres::validation
