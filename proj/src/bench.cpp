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

#include "distres/bench.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>

namespace distres {

void RunConfig::validate() const {
  if (p < 1) throw RangeError("--p must be at least 1");
  if (b < 1) throw RangeError("--b must be at least 1");
  if (batches < 1) throw RangeError("--batches must be at least 1");
  if (threads < 1) throw RangeError("--threads must be at least 1");
  if (run_id.find_first_of(",\n\"") != std::string::npos) {
    throw RangeError("--run-id must not contain commas, quotes or newlines");
  }
  sampler().validate();
}

SamplerConfig RunConfig::sampler() const {
  SamplerConfig c;
  c.mode = mode;
  c.selection = selection;
  c.k = k;
  c.k_lower = k_lower;
  c.k_upper = k_upper;
  c.pivots = pivots;
  c.blocked_skip = blocked_skip;
  c.local_threshold = local_threshold;
  c.seed = seed;
  return c;
}

RunResult run_benchmark(const RunConfig& config) {
  config.validate();
  const auto p = static_cast<std::size_t>(config.p);
  const std::size_t stride = p + 1;
  std::vector<MetricsRow> rows(config.batches * stride);
  std::vector<std::uint64_t> pe_totals(p, 0);
  const Workload workload(config.p, config.b, config.weights, config.seed);
  const SamplerConfig sc = config.sampler();

  run_spmd(
      config.p,
      [&](PeHandle& h) {
        DistributedSampler sampler(sc, h.rank());
        std::vector<double> weights;
        std::vector<std::uint64_t> ids;
        for (std::uint64_t batch = 0; batch < config.batches; ++batch) {
          workload.fill(batch, h.rank(), weights, ids);
          const CommCounters before = h.counters();
          const BatchReport rep = sampler.process_batch(h, BatchView{weights, ids});
          const CommCounters delta = h.counters() - before;

          MetricsRow& row = rows[batch * stride + 1 + static_cast<std::size_t>(h.rank())];
          row.run_id = config.run_id;
          row.batch = batch;
          row.pe = h.rank();
          row.insertions = rep.inserted;
          row.scanned = rep.scanned;
          row.sel_rounds = rep.rounds;
          row.threshold = rep.threshold;
          row.sample_size = sampler.reservoir().size() + sampler.retained().size();
          row.comm = delta;
          row.wall_ns = rep.wall_ns;
          pe_totals[static_cast<std::size_t>(h.rank())] += rep.inserted;

          if (h.rank() == 0) {
            MetricsRow& global = rows[batch * stride];
            global.run_id = config.run_id;
            global.batch = batch;
            global.pe = -1;
            global.insertions = rep.candidates;
            global.scanned = config.b * p;
            global.sel_rounds = rep.rounds;
            global.threshold = rep.threshold;
            global.sample_size = rep.sample_size;
            global.comm = delta;
          }
        }
      },
      SpmdOptions{.threads = config.threads});

  RunResult result;
  RunSummary& s = result.summary;
  std::uint64_t rounds = 0;
  double wall = 0;
  for (std::uint64_t batch = 0; batch < config.batches; ++batch) {
    MetricsRow& global = rows[batch * stride];
    for (std::size_t pe = 0; pe < p; ++pe) {
      global.wall_ns = std::max(global.wall_ns, rows[batch * stride + 1 + pe].wall_ns);
    }
    wall += static_cast<double>(global.wall_ns);
    if (global.sel_rounds > 0) {
      ++s.selections;
      rounds += global.sel_rounds;
    }
    s.comm = s.comm + global.comm;
  }
  std::uint64_t total = 0;
  for (auto t : pe_totals) {
    total += t;
    s.max_pe_insertions = std::max(s.max_pe_insertions, t);
  }
  s.mean_pe_insertions = static_cast<double>(total) / static_cast<double>(p);
  s.mean_rounds = s.selections ? static_cast<double>(rounds) / static_cast<double>(s.selections) : 0.0;
  s.items = config.b * p * config.batches;
  s.items_per_second = wall > 0 ? static_cast<double>(s.items) / (wall * 1e-9) : 0.0;
  s.final_threshold = rows[(config.batches - 1) * stride].threshold;
  result.rows = std::move(rows);
  return result;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << kCsvHeader << '\n';
  for (const MetricsRow& r : rows) {
    out << r.run_id << ',' << r.batch << ',' << r.pe << ',' << r.insertions << ','
        << r.scanned << ',' << r.sel_rounds << ',';
    if (r.threshold.is_set()) out << format_double(r.threshold.value());
    out << ',' << r.sample_size << ',' << r.comm.broadcasts << ',' << r.comm.all_reduces
        << ',' << r.comm.gathers << ',' << r.comm.words << ',' << r.wall_ns << '\n';
  }
}

void write_summary(std::ostream& out, const RunConfig& c, const RunSummary& s) {
  out << "run " << c.run_id << ": p=" << c.p << " b=" << c.b << " batches=" << c.batches
      << " items=" << s.items << '\n';
  out << "  insertions per PE: mean " << format_double(s.mean_pe_insertions) << ", max "
      << s.max_pe_insertions << '\n';
  out << "  selections " << s.selections << ", mean rounds "
      << format_double(s.mean_rounds) << '\n';
  out << "  collectives: " << s.comm.broadcasts << " broadcast, " << s.comm.all_reduces
      << " all-reduce, " << s.comm.gathers << " gather, " << s.comm.words << " words\n";
  out << "  final threshold "
      << (s.final_threshold.is_set() ? format_double(s.final_threshold.value()) : "unset")
      << '\n';
  out << "  throughput " << format_double(s.items_per_second) << " items/s\n";
}

}  // namespace distres
