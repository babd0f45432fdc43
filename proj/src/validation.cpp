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

#include "distres/validation.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "distres/bench.hpp"
#include "distres/comm.hpp"
#include "distres/dist_select.hpp"
#include "distres/oracle.hpp"
#include "distres/reservoir_stream.hpp"
#include "distres/simd/block_sum.hpp"
#include "distres/skip_scan.hpp"
#include "distres/workload.hpp"

namespace distres::validation {

namespace {

constexpr double kPFloor = 0.001;

// Per-item critical z for a family of m items whose family-wise level is
// that of a single 3-SE check (Bonferroni).
double per_item_z(std::size_t m) {
  const boost::math::normal n;
  const double alpha = 2.0 * boost::math::cdf(boost::math::complement(n, 3.0));
  return boost::math::quantile(boost::math::complement(n, alpha / (2.0 * static_cast<double>(m))));
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

CriterionResult titled(int id, std::string title) {
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  return r;
}

std::uint64_t run_seed(std::uint64_t base, std::uint64_t run) {
  return base ^ (run * 0x9E3779B97F4A7C15ULL);
}

// --- inclusion experiments -------------------------------------------------

struct Inclusion {
  std::vector<std::uint64_t> items;
  std::vector<std::uint64_t> subsets;
  std::uint64_t runs = 0;
  std::uint64_t size_errors = 0;
};

struct Share {
  std::vector<double> weights;
  std::vector<std::uint64_t> ids;
};

// Items are cut into `batches` consecutive chunks; inside a chunk item i
// goes to PE i mod p. Item ids are stream positions.
Inclusion stream_inclusion(const std::vector<double>& weights, Mode mode,
                           std::uint64_t k, int p, std::uint64_t batches,
                           std::uint64_t runs, std::uint64_t seed, int threads) {
  const std::size_t n = weights.size();
  const std::size_t chunk = (n + batches - 1) / batches;
  std::vector<std::vector<Share>> layout(batches, std::vector<Share>(static_cast<std::size_t>(p)));
  for (std::size_t i = 0; i < n; ++i) {
    Share& s = layout[i / chunk][i % static_cast<std::size_t>(p)];
    s.weights.push_back(weights[i]);
    s.ids.push_back(i);
  }

  Inclusion out;
  out.items.assign(n, 0);
  if (n <= oracle::kMaxExactItems) out.subsets.assign(std::size_t{1} << n, 0);
  out.runs = runs;
  SamplerConfig base;
  base.mode = mode;
  base.k = k;

  run_spmd(
      p,
      [&](PeHandle& h) {
        const auto me = static_cast<std::size_t>(h.rank());
        for (std::uint64_t r = 0; r < runs; ++r) {
          SamplerConfig c = base;
          c.seed = run_seed(seed, r);
          DistributedSampler sampler(c, h.rank());
          for (std::uint64_t b = 0; b < batches; ++b) {
            const Share& s = layout[b][me];
            sampler.process_batch(h, BatchView{s.weights, s.ids});
          }
          const std::vector<KeyedItem> sample = sampler.current_sample(h, 0);
          if (h.rank() != 0) continue;
          std::size_t mask = 0;
          for (const KeyedItem& x : sample) {
            ++out.items[x.item_id];
            mask |= std::size_t{1} << (x.item_id % 64);
          }
          if (!out.subsets.empty()) ++out.subsets[mask];
          if (sample.size() != std::min<std::uint64_t>(k, n)) ++out.size_errors;
        }
      },
      SpmdOptions{.threads = threads});
  return out;
}

std::vector<std::uint64_t> reference_inclusion(const std::vector<double>& weights,
                                               std::uint64_t k, std::uint64_t runs,
                                               std::uint64_t seed) {
  std::vector<std::uint64_t> counts(weights.size(), 0);
  Rng rng(seed, 0);
  for (std::uint64_t r = 0; r < runs; ++r) {
    for (std::size_t i : oracle::reference_sample(rng, weights, k)) ++counts[i];
  }
  return counts;
}

double max_z(const std::vector<std::uint64_t>& counts, const std::vector<double>& pi,
             std::uint64_t runs) {
  double worst = 0.0;
  const double n = static_cast<double>(runs);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double f = static_cast<double>(counts[i]) / n;
    const double se = std::sqrt(pi[i] * (1.0 - pi[i]) / n);
    const double z = se > 0 ? std::abs(f - pi[i]) / se
                            : (f == pi[i] ? 0.0 : std::numeric_limits<double>::infinity());
    worst = std::max(worst, z);
  }
  return worst;
}

// Two-sample test over items, bins ordered by weight.
double compare_by_weight(const std::vector<double>& weights,
                         const std::vector<std::uint64_t>& a,
                         const std::vector<std::uint64_t>& b) {
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return weights[x] < weights[y]; });
  std::vector<std::uint64_t> sa;
  std::vector<std::uint64_t> sb;
  for (std::size_t i : order) {
    sa.push_back(a[i]);
    sb.push_back(b[i]);
  }
  return oracle::chi_squared_two_sample(sa, sb);
}

std::vector<double> uniform_weights(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  Rng rng(seed, stream);
  std::vector<double> w(n);
  for (auto& x : w) x = 100.0 * rng.next_unit();
  return w;
}

// Exact small-instance check shared by the weighted and uniform criteria.
bool small_instance(const std::vector<double>& weights, Mode mode, std::uint64_t k,
                    std::uint64_t runs, const Options& o, std::uint64_t seed,
                    std::string& detail) {
  const oracle::InclusionTable table = oracle::exact_inclusion(weights, k);
  const double z_crit = per_item_z(weights.size());
  bool pass = true;
  for (int p : {1, 4}) {
    for (std::uint64_t batches : {std::uint64_t{1}, std::uint64_t{weights.size()}}) {
      const Inclusion inc =
          stream_inclusion(weights, mode, k, p, batches, runs, seed + 97 * p + batches, o.threads);
      const double z = max_z(inc.items, table.probability, runs);
      const double pv = oracle::chi_squared_gof(inc.subsets, table.subset_probability, runs);
      const bool ok = z <= z_crit && pv > kPFloor && inc.size_errors == 0;
      pass = pass && ok;
      detail += "p=" + std::to_string(p) + "/" + std::to_string(batches) + " batch" +
                (batches == 1 ? "" : "es") + ": freq (";
      for (std::size_t i = 0; i < inc.items.size(); ++i) {
        detail += (i ? ", " : "") +
                  fmt(static_cast<double>(inc.items[i]) / static_cast<double>(runs));
      }
      detail += ") max z " + fmt(z, 3) + " (limit " + fmt(z_crit, 3) +
                "), subset chi2 p " + fmt(pv, 3) +
                (ok ? "" : " [FAIL]") + "; ";
    }
  }
  return pass;
}

// --- criteria ----------------------------------------------------------------

CriterionResult c1_exact_oracle(const Options& o) {
  CriterionResult r = titled(1, "weighted inclusion frequencies match exact enumeration");
  const std::vector<double> weights{1, 1, 2};
  const auto table = oracle::exact_inclusion(weights, 2);
  const bool oracle_ok =
      table.exact == std::vector<std::string>{"7/12", "7/12", "5/6"};
  r.detail = "oracle (" + table.exact[0] + ", " + table.exact[1] + ", " + table.exact[2] + "); ";
  const std::uint64_t runs = o.full ? 200000 : 20000;
  r.pass = small_instance(weights, Mode::weighted, 2, runs, o, o.seed + 1, r.detail) && oracle_ok;
  r.detail += std::to_string(runs) + " runs each";
  return r;
}

CriterionResult c2_streaming_vs_oneshot(const Options& o) {
  CriterionResult r = titled(2, "streaming sample matches one-shot exponential clocks");
  const std::size_t n = o.full ? 10000 : 2000;
  const std::uint64_t runs = o.full ? 10000 : 2000;
  const std::uint64_t k = 50;
  r.pass = true;
  r.detail = "p-values";
  for (std::uint64_t inst = 0; inst < 5; ++inst) {
    const auto w = uniform_weights(n, o.seed, 1000 + inst);
    const Inclusion stream =
        stream_inclusion(w, Mode::weighted, k, 1, 4, runs, o.seed + 200 + inst, o.threads);
    const auto ref = reference_inclusion(w, k, runs, o.seed + 300 + inst);
    const double pv = compare_by_weight(w, stream.items, ref);
    r.pass = r.pass && pv > kPFloor && stream.size_errors == 0;
    r.detail += (inst ? ", " : " ") + fmt(pv, 3);
  }
  r.detail += " (n=" + std::to_string(n) + ", k=50, 4 batches, " + std::to_string(runs) +
              " runs per side)";
  return r;
}

CriterionResult c3_distributed_vs_sequential(const Options& o) {
  CriterionResult r = titled(3, "distributed sample matches sequential");
  const std::size_t n = o.full ? 10000 : 2000;
  const std::uint64_t runs = o.full ? 10000 : 2000;
  const std::vector<int> ps{1, 2, 8, 32};
  const auto w = uniform_weights(n, o.seed, 3000);
  std::vector<Inclusion> inc;
  for (int p : ps) {
    inc.push_back(stream_inclusion(w, Mode::weighted, 50, p, 4, runs,
                                   o.seed + 400 + static_cast<std::uint64_t>(p), o.threads));
  }
  r.pass = true;
  r.detail = "pairwise p-values";
  double worst = 1.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    r.pass = r.pass && inc[i].size_errors == 0;
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      const double pv = compare_by_weight(w, inc[i].items, inc[j].items);
      worst = std::min(worst, pv);
      r.pass = r.pass && pv > kPFloor;
      r.detail += " " + std::to_string(ps[i]) + "v" + std::to_string(ps[j]) + ":" + fmt(pv, 3);
    }
  }
  r.detail += "; min " + fmt(worst, 3) + " (" + std::to_string(runs) + " runs per p)";
  return r;
}

CriterionResult c4_selection(const Options& o) {
  CriterionResult r = titled(4, "selection exactness and range containment");
  const int instances = 200;
  const std::uint64_t max_g = o.full ? 10000 : 3000;
  int exact_ok = 0;
  int gather_ok = 0;
  int range_ok = 0;
  int agree_ok = 0;
  double exact_rounds = 0;
  double range_rounds = 0;
  for (int inst = 0; inst < instances; ++inst) {
    Rng gen(o.seed, 4000 + static_cast<std::uint64_t>(inst));
    const int p = 1 + static_cast<int>(gen() % 16);
    const std::uint64_t g = 1 + gen() % max_g;
    const std::uint64_t distinct = std::max<std::uint64_t>(1, g / 4);
    std::vector<std::vector<KeyedItem>> locals(static_cast<std::size_t>(p));
    for (std::uint64_t i = 0; i < g; ++i) {
      const auto pe = static_cast<std::uint32_t>(gen() % static_cast<std::uint64_t>(p));
      locals[pe].push_back(KeyedItem{static_cast<double>(gen() % distinct), pe, i});
    }
    for (auto& l : locals) std::sort(l.begin(), l.end());
    const std::uint64_t k = 1 + gen() % g;
    const std::uint32_t pivots = std::array<std::uint32_t, 4>{1, 2, 3, 8}[gen() % 4];
    const std::uint64_t lo = 1 + gen() % g;
    const std::uint64_t hi = std::min(g, 2 * lo);

    const KeyedItem expect = oracle::kth_of_merged(locals, k);
    std::vector<KeyedItem> merged;
    for (const auto& l : locals) merged.insert(merged.end(), l.begin(), l.end());
    std::sort(merged.begin(), merged.end());

    std::vector<std::array<SelectionResult, 3>> got(static_cast<std::size_t>(p));
    run_spmd(
        p,
        [&](PeHandle& h) {
          const auto& mine = locals[static_cast<std::size_t>(h.rank())];
          const Reservoir res = Reservoir::from_sorted(mine);
          Rng rng(run_seed(o.seed, static_cast<std::uint64_t>(inst)),
                  2 * static_cast<std::uint64_t>(h.rank()) + 1);
          SelectOptions opt;
          opt.watch = &expect;
          auto& slot = got[static_cast<std::size_t>(h.rank())];
          slot[0] = select_exact(h, res, k, pivots, rng, opt);
          std::vector<KeyedItem> retained;
          slot[1] = select_gather(h, mine, k, retained, 0);
          slot[2] = select_range(h, res, SelectionSpec{lo, hi, pivots}, rng);
        },
        SpmdOptions{.threads = o.threads});

    const auto& e = got[0][0];
    const auto& ga = got[0][1];
    const auto& rg = got[0][2];
    exact_ok += e.threshold_element == expect && e.achieved_rank == k;
    gather_ok += ga.threshold_element == expect && ga.achieved_rank == k;
    const auto le = static_cast<std::uint64_t>(
        std::upper_bound(merged.begin(), merged.end(), rg.threshold_element) - merged.begin());
    range_ok += rg.achieved_rank >= lo && rg.achieved_rank <= hi && le == rg.achieved_rank;
    agree_ok += std::all_of(got.begin(), got.end(), [&](const auto& s) { return s == got[0]; });
    exact_rounds += e.rounds;
    range_rounds += rg.rounds;
  }
  r.pass = exact_ok == instances && gather_ok == instances && range_ok == instances &&
           agree_ok == instances;
  r.detail = "exact " + std::to_string(exact_ok) + "/200, gather " + std::to_string(gather_ok) +
             "/200, range " + std::to_string(range_ok) + "/200, all PEs agree " +
             std::to_string(agree_ok) + "/200; mean rounds exact " +
             fmt(exact_rounds / instances, 3) + ", range " + fmt(range_rounds / instances, 3);
  return r;
}

CriterionResult c5_invariants(const Options& o) {
  CriterionResult r = titled(5, "size, key bound, monotone threshold, threshold oracle");
  const int p = o.full ? 16 : 8;
  const std::uint64_t k = o.full ? 1000 : 200;
  const std::uint64_t b = o.full ? 10000 : 2000;
  const std::uint64_t batches = o.full ? 100 : 30;
  const Workload wl(p, b, WeightDist::uniform, o.seed + 5);
  SamplerConfig sc;
  sc.k = k;
  sc.seed = o.seed + 5;
  sc.debug_checks = false;

  std::uint64_t checked = 0;
  std::uint64_t size_bad = 0;
  std::uint64_t bound_bad = 0;
  std::uint64_t monotone_bad = 0;
  std::uint64_t oracle_bad = 0;
  run_spmd(
      p,
      [&](PeHandle& h) {
        DistributedSampler sampler(sc, h.rank());
        std::vector<KeyedItem> snapshot;
        sampler.set_selection_observer(
            [&](const Reservoir& res) { snapshot = res.to_vector(); });
        std::vector<double> w;
        std::vector<std::uint64_t> ids;
        double previous = std::numeric_limits<double>::infinity();
        for (std::uint64_t batch = 0; batch < batches; ++batch) {
          wl.fill(batch, h.rank(), w, ids);
          snapshot.clear();
          const BatchReport rep = sampler.process_batch(h, BatchView{w, ids});
          if (o.inject_threshold_fault && batch == batches / 2 && sampler.threshold().is_set()) {
            sampler.corrupt_threshold_for_testing(sampler.threshold().value() * 0.5);
          }
          if ((batch + 1) * b * static_cast<std::uint64_t>(p) < k) continue;

          const Reservoir& res = sampler.reservoir();
          const std::uint64_t size =
              h.all_reduce(static_cast<std::uint64_t>(res.size()), ops::Sum{});
          const double local_max =
              res.empty() ? -std::numeric_limits<double>::infinity() : res.max().key;
          const double global_max = h.all_reduce(local_max, ops::Max{});
          const std::vector<KeyedItem> all =
              h.gather(std::span<const KeyedItem>(snapshot), 0);
          if (h.rank() != 0) continue;
          ++checked;
          const bool set = sampler.threshold().is_set();
          const double t = set ? sampler.threshold().value() : -1.0;
          size_bad += size != k || rep.sample_size != k;
          bound_bad += !set || global_max > t;
          monotone_bad += !set || t > previous;
          oracle_bad += !rep.selected || all.size() < k ||
                        oracle::kth_of_merged({all}, k).key != rep.threshold.value();
          previous = t;
        }
      },
      SpmdOptions{.threads = o.threads});
  const std::uint64_t violations = size_bad + bound_bad + monotone_bad + oracle_bad;
  r.pass = violations == 0 && checked > 0;
  r.detail = std::to_string(checked) + " batches checked; violations: size " +
             std::to_string(size_bad) + ", key bound " + std::to_string(bound_bad) +
             ", monotone " + std::to_string(monotone_bad) + ", oracle " +
             std::to_string(oracle_bad) + (o.inject_threshold_fault ? " (fault injected)" : "");
  return r;
}

CriterionResult c6_insertion_bounds(const Options& o) {
  CriterionResult r = titled(6, "insertion-count bounds (per-PE mean and max)");
  RunConfig rc;
  rc.p = 16;
  rc.k = 1000;
  rc.b = 10000;
  rc.batches = 10;
  rc.threads = o.threads;
  const int seeds = o.full ? 30 : 10;
  const double n = static_cast<double>(rc.b * rc.batches) * rc.p;
  const double kp = static_cast<double>(rc.k) / rc.p;
  const double mu = kp * (1.0 + std::log(n / static_cast<double>(rc.k)));
  const double bound_mean = 2.0 * (mu + kp);
  const double bound_max = 2.0 * (mu + std::sqrt(2.0 * mu * std::log(rc.p)) + kp);

  double mean_sum = 0;
  double max_sum = 0;
  double later_mean_sum = 0;
  double later_max_sum = 0;
  double first_mean_sum = 0;
  const auto stride = static_cast<std::size_t>(rc.p) + 1;
  for (int s = 0; s < seeds; ++s) {
    rc.seed = o.seed + 600 + static_cast<std::uint64_t>(s);
    const RunResult res = run_benchmark(rc);
    std::vector<double> total(static_cast<std::size_t>(rc.p), 0.0);
    std::vector<double> later(static_cast<std::size_t>(rc.p), 0.0);
    for (std::uint64_t batch = 0; batch < rc.batches; ++batch) {
      for (std::size_t pe = 0; pe < total.size(); ++pe) {
        const auto ins = static_cast<double>(res.rows[batch * stride + 1 + pe].insertions);
        total[pe] += ins;
        if (batch > 0) later[pe] += ins;
      }
    }
    const double mean = std::accumulate(total.begin(), total.end(), 0.0) / rc.p;
    const double later_mean = std::accumulate(later.begin(), later.end(), 0.0) / rc.p;
    mean_sum += mean;
    max_sum += *std::max_element(total.begin(), total.end());
    later_mean_sum += later_mean;
    later_max_sum += *std::max_element(later.begin(), later.end());
    first_mean_sum += mean - later_mean;
  }
  const double mean = mean_sum / seeds;
  const double max = max_sum / seeds;
  r.pass = mean <= bound_mean && max <= bound_max;
  r.detail = "mean per-PE insertions " + fmt(mean, 6) + " (bound " + fmt(bound_mean, 6) +
             "), mean max-PE " + fmt(max, 6) + " (bound " + fmt(bound_max, 6) +
             "); first batch alone " + fmt(first_mean_sum / seeds, 6) +
             " per PE; batches 2.." + std::to_string(rc.batches) + ": mean " +
             fmt(later_mean_sum / seeds, 5) + ", max " + fmt(later_max_sum / seeds, 5) +
             "; " + std::to_string(seeds) + " seeds";
  return r;
}

CriterionResult c7_multipivot(const Options& o) {
  CriterionResult r = titled(7, "multi-pivot selection needs fewer rounds");
  RunConfig rc;
  rc.p = o.full ? 64 : 16;
  rc.k = o.full ? 10000 : 2000;
  rc.b = o.full ? 10000 : 2000;
  rc.batches = o.full ? 50 : 15;
  rc.threads = o.threads;
  const int seeds = 10;
  int wins = 0;
  double sum1 = 0;
  double sum8 = 0;
  for (int s = 0; s < seeds; ++s) {
    rc.seed = o.seed + 700 + static_cast<std::uint64_t>(s);
    rc.pivots = 1;
    const double one = run_benchmark(rc).summary.mean_rounds;
    rc.pivots = 8;
    const double eight = run_benchmark(rc).summary.mean_rounds;
    wins += eight < one;
    sum1 += one;
    sum8 += eight;
  }
  r.pass = wins >= 9;
  r.detail = "d=8 below d=1 in " + std::to_string(wins) + "/10 seeds; mean rounds d=1 " +
             fmt(sum1 / seeds, 3) + ", d=8 " + fmt(sum8 / seeds, 3) + " (p=" +
             std::to_string(rc.p) + ", k=" + std::to_string(rc.k) + ", b=" +
             std::to_string(rc.b) + ", " + std::to_string(rc.batches) + " batches)";
  return r;
}

CriterionResult c8_gather_words(const Options& o) {
  CriterionResult r = titled(8, "gather baseline communicates at least twice as much");
  RunConfig rc;
  rc.p = o.full ? 64 : 16;
  rc.k = o.full ? 10000 : 5000;
  rc.b = o.full ? 10000 : 5000;
  rc.batches = o.full ? 20 : 15;
  rc.threads = o.threads;
  rc.seed = o.seed + 8;
  rc.selection = Selection::exact;
  const RunResult exact = run_benchmark(rc);
  rc.selection = Selection::gather;
  const RunResult gather = run_benchmark(rc);
  const auto stride = static_cast<std::size_t>(rc.p) + 1;
  bool ok = true;
  double min_ratio = std::numeric_limits<double>::infinity();
  std::uint64_t gather_min = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t exact_max = 0;
  for (std::uint64_t batch = 10; batch < rc.batches; ++batch) {
    const std::uint64_t gw = gather.rows[batch * stride].comm.words;
    const std::uint64_t ew = exact.rows[batch * stride].comm.words;
    ok = ok && gw >= 2 * ew;
    min_ratio = std::min(min_ratio, static_cast<double>(gw) / static_cast<double>(std::max<std::uint64_t>(ew, 1)));
    gather_min = std::min(gather_min, gw);
    exact_max = std::max(exact_max, ew);
  }
  r.pass = ok;
  r.detail = "batches 11.." + std::to_string(rc.batches) + ": gather words >= " +
             std::to_string(gather_min) + ", exact words <= " + std::to_string(exact_max) +
             ", smallest ratio " + fmt(min_ratio, 3) + " (p=" + std::to_string(rc.p) +
             ", k=" + std::to_string(rc.k) + ")";
  return r;
}

CriterionResult c9_uniform(const Options& o) {
  CriterionResult r = titled(9, "uniform mode inclusion and insertion probability");
  const std::uint64_t runs = o.full ? 200000 : 20000;
  const std::vector<double> weights{1, 1, 1, 1};
  const bool incl = small_instance(weights, Mode::uniform, 2, runs, o, o.seed + 9, r.detail);

  const std::uint64_t m = 100000;
  const double t = 0.5;
  Rng rng(o.seed, 9000);
  const ScanStats st = scan_uniform(rng, m, t, [](std::size_t, double) {});
  const double mean = static_cast<double>(m) * t;
  const double sigma = std::sqrt(static_cast<double>(m) * t * (1 - t));
  const double z = std::abs(static_cast<double>(st.inserted) - mean) / sigma;

  std::uint64_t reads = 0;
  SamplerConfig sc;
  sc.mode = Mode::uniform;
  sc.k = 100;
  sc.seed = o.seed + 90;
  const Workload wl(1, 5000, WeightDist::uniform, o.seed + 91);
  run_spmd(1, [&](PeHandle& h) {
    DistributedSampler sampler(sc, 0);
    std::vector<double> w;
    std::vector<std::uint64_t> ids;
    for (std::uint64_t batch = 0; batch < 10; ++batch) {
      wl.fill(batch, 0, w, ids);
      reads += sampler.process_batch(h, BatchView{w, ids}).weight_reads;
    }
  });

  r.pass = incl && z <= 3.0 && reads == 0;
  r.detail += "binomial: " + std::to_string(st.inserted) + " of " + std::to_string(m) +
              " inserted at T=0.5 (z " + fmt(z, 3) + "); weight reads " + std::to_string(reads);
  return r;
}

std::string csv_without_wall(const RunConfig& rc) {
  std::ostringstream os;
  write_csv(os, run_benchmark(rc).rows);
  std::istringstream in(os.str());
  std::string line;
  std::string out;
  while (std::getline(in, line)) {
    out += line.substr(0, line.rfind(','));
    out += '\n';
  }
  return out;
}

CriterionResult c10_determinism(const Options& o) {
  CriterionResult r = titled(10, "CSV identical across thread counts");
  std::vector<RunConfig> configs;
  RunConfig base;
  base.p = 4;
  base.k = 100;
  base.b = 1000;
  base.batches = 10;
  base.seed = 7;
  configs.push_back(base);
  RunConfig multi = base;
  multi.pivots = 8;
  multi.p = 16;
  configs.push_back(multi);
  RunConfig range = base;
  range.selection = Selection::range;
  range.k_lower = 80;
  range.k_upper = 160;
  configs.push_back(range);
  RunConfig gather = base;
  gather.selection = Selection::gather;
  configs.push_back(gather);
  RunConfig uniform = base;
  uniform.mode = Mode::uniform;
  uniform.weights = WeightDist::skewed;
  configs.push_back(uniform);

  int same = 0;
  for (RunConfig rc : configs) {
    rc.threads = 1;
    const std::string one = csv_without_wall(rc);
    bool all = true;
    for (int t : {2, 4, 7}) {
      rc.threads = t;
      all = all && csv_without_wall(rc) == one;
    }
    same += all;
  }
  (void)o;
  r.pass = same == static_cast<int>(configs.size());
  r.detail = std::to_string(same) + "/" + std::to_string(configs.size()) +
             " configurations byte-identical for 1, 2, 4 and 7 threads";
  return r;
}

CriterionResult c11_blocked_skip(const Options& o) {
  CriterionResult r = titled(11, "blocked skip equals scalar skip on integer weights");
  const int streams = o.full ? 1000 : 200;
  int same = 0;
  int engine_same = 0;
  int engine_runs = 0;
  std::uint64_t insertions = 0;
  for (int s = 0; s < streams; ++s) {
    Rng gen(o.seed, 11000 + static_cast<std::uint64_t>(s));
    const std::size_t n = 100 + gen() % 5000;
    std::vector<double> w(n);
    for (auto& x : w) x = static_cast<double>(1 + gen() % (std::uint64_t{1} << 20));
    const double t = std::exp(std::log(1e-8) + (std::log(1e-4) - std::log(1e-8)) * gen.next_unit());

    std::vector<std::pair<std::size_t, double>> blocked;
    std::vector<std::pair<std::size_t, double>> scalar;
    Rng r1(o.seed + 11, static_cast<std::uint64_t>(s));
    Rng r2(o.seed + 11, static_cast<std::uint64_t>(s));
    scan_weighted(r1, w, t, true, [&](std::size_t i, double key) { blocked.emplace_back(i, key); });
    scan_weighted(r2, w, t, false, [&](std::size_t i, double key) { scalar.emplace_back(i, key); });
    same += blocked == scalar;
    insertions += scalar.size();

    if (s % 10 == 0) {
      ++engine_runs;
      std::vector<std::uint64_t> ids(n);
      std::iota(ids.begin(), ids.end(), 0);
      std::vector<KeyedItem> samples[2];
      for (int mode = 0; mode < 2; ++mode) {
        SamplerConfig sc;
        sc.k = 20;
        sc.seed = run_seed(o.seed, static_cast<std::uint64_t>(s));
        sc.blocked_skip = mode == 1;
        run_spmd(1, [&](PeHandle& h) {
          DistributedSampler sampler(sc, 0);
          const std::size_t chunk = (n + 4) / 5;
          for (std::size_t from = 0; from < n; from += chunk) {
            const std::size_t len = std::min(chunk, n - from);
            sampler.process_batch(
                h, BatchView{std::span<const double>(w).subspan(from, len),
                             std::span<const std::uint64_t>(ids).subspan(from, len)});
          }
          samples[mode] = sampler.current_sample(h, 0);
        });
      }
      engine_same += samples[0] == samples[1];
    }
  }
  r.pass = same == streams && engine_same == engine_runs;
  r.detail = std::to_string(same) + "/" + std::to_string(streams) + " scans identical (" +
             std::to_string(insertions) + " insertions), engine samples " +
             std::to_string(engine_same) + "/" + std::to_string(engine_runs) +
             " identical; block kernel " + simd::isa_name(simd::best_isa());
  return r;
}

}  // namespace

CriterionResult run_criterion(int id, const Options& options) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = c1_exact_oracle(options); break;
      case 2: r = c2_streaming_vs_oneshot(options); break;
      case 3: r = c3_distributed_vs_sequential(options); break;
      case 4: r = c4_selection(options); break;
      case 5: r = c5_invariants(options); break;
      case 6: r = c6_insertion_bounds(options); break;
      case 7: r = c7_multipivot(options); break;
      case 8: r = c8_gather_words(options); break;
      case 9: r = c9_uniform(options); break;
      case 10: r = c10_determinism(options); break;
      case 11: r = c11_blocked_skip(options); break;
      default: throw RangeError("no criterion " + std::to_string(id));
    }
  } catch (const RangeError&) {
    throw;
  } catch (const std::exception& e) {
    r.id = id;
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CriterionResult> run_all(const Options& options,
                                     const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriteria; ++id) {
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), id) == options.only.end()) {
      continue;
    }
    out.push_back(run_criterion(id, options));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string format(const CriterionResult& r) {
  return std::string(r.pass ? "PASS" : "FAIL") + " [" + std::to_string(r.id) + "] " + r.title +
         ": " + r.detail + " (" + fmt(r.seconds, 3) + " s)";
}

}  // namespace distres::validation
