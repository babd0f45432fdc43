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
#include <iosfwd>
#include <string>
#include <vector>

#include "distres/comm.hpp"
#include "distres/reservoir_stream.hpp"
#include "distres/workload.hpp"

namespace distres {

struct RunConfig {
  std::string run_id = "run";
  int p = 4;
  std::uint64_t k = 100;
  std::uint64_t k_lower = 0;
  std::uint64_t k_upper = 0;
  /// Items per PE per batch.
  std::uint64_t b = 1000;
  std::uint64_t batches = 10;
  Mode mode = Mode::weighted;
  Selection selection = Selection::exact;
  std::uint32_t pivots = 1;
  WeightDist weights = WeightDist::uniform;
  std::uint64_t seed = 1;
  int threads = 1;
  bool blocked_skip = true;
  bool local_threshold = true;

  /// Throws RangeError if the flags are inconsistent.
  void validate() const;
  [[nodiscard]] SamplerConfig sampler() const;
};

/// One CSV line. pe == -1 marks the per-batch global row.
struct MetricsRow {
  std::string run_id;
  std::uint64_t batch = 0;
  int pe = 0;
  std::uint64_t insertions = 0;
  std::uint64_t scanned = 0;
  std::uint32_t sel_rounds = 0;
  Threshold threshold;
  std::uint64_t sample_size = 0;
  CommCounters comm;
  std::uint64_t wall_ns = 0;
};

struct RunSummary {
  double mean_pe_insertions = 0;
  std::uint64_t max_pe_insertions = 0;
  std::uint64_t selections = 0;
  double mean_rounds = 0;
  double items_per_second = 0;
  std::uint64_t items = 0;
  Threshold final_threshold;
  CommCounters comm;
};

struct RunResult {
  std::vector<MetricsRow> rows;
  RunSummary summary;
};

/// Runs the configured stream through p simulated PEs.
RunResult run_benchmark(const RunConfig& config);

inline constexpr const char* kCsvHeader =
    "run_id,batch,pe,insertions,scanned,sel_rounds,threshold,sample_size,"
    "bcasts,allreduces,gathers,words,wall_ns";

void write_csv(std::ostream& out, const std::vector<MetricsRow>& rows);
void write_summary(std::ostream& out, const RunConfig& config, const RunSummary& s);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace distres
