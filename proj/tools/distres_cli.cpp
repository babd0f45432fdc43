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

// distres run      simulate a stream and write per-batch metrics as CSV
// distres validate run the acceptance battery

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "distres/bench.hpp"
#include "distres/errors.hpp"
#include "distres/validation.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kRuntime = 2;
constexpr int kValidation = 3;

struct SelectFlag {
  distres::Selection selection = distres::Selection::exact;
  std::uint32_t pivots = 1;
};

SelectFlag parse_select(const std::string& text) {
  if (text == "range") return {distres::Selection::range, 1};
  if (text == "gather") return {distres::Selection::gather, 1};
  if (text.rfind("exact-", 0) == 0) {
    const std::string d = text.substr(6);
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(d, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == d.size() && v >= 1 && v <= 1u << 16) {
      return {distres::Selection::exact, static_cast<std::uint32_t>(v)};
    }
  }
  throw CLI::ValidationError("--select", "expected exact-<d>, range or gather, got " + text);
}

int run(const distres::RunConfig& rc, const std::string& out_path) {
  const distres::RunResult result = distres::run_benchmark(rc);
  if (out_path.empty() || out_path == "-") {
    distres::write_csv(std::cout, result.rows);
    distres::write_summary(std::cerr, rc, result.summary);
    return kOk;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + out_path);
  distres::write_csv(out, result.rows);
  out.close();
  if (!out) throw std::runtime_error("failed writing " + out_path);
  distres::write_summary(std::cout, rc, result.summary);
  return kOk;
}

int validate(const distres::validation::Options& opts) {
  bool all = true;
  distres::validation::run_all(opts, [&](const distres::validation::CriterionResult& r) {
    std::cout << distres::validation::format(r) << std::endl;
    all = all && r.pass;
  });
  return all ? kOk : kValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed weighted and uniform reservoir sampling simulator"};
  app.require_subcommand(1);

  distres::RunConfig rc;
  std::string select = "exact-1";
  std::string out_path;
  bool no_blocked = false;
  bool no_local = false;
  const std::map<std::string, distres::Mode> modes{{"weighted", distres::Mode::weighted},
                                                   {"uniform", distres::Mode::uniform}};
  const std::map<std::string, distres::WeightDist> dists{
      {"uniform", distres::WeightDist::uniform}, {"skewed", distres::WeightDist::skewed}};

  CLI::App* run_cmd = app.add_subcommand("run", "Simulate a stream and emit per-batch CSV");
  run_cmd->add_option("--p", rc.p, "Simulated PEs")->check(CLI::Range(1, 1 << 20));
  run_cmd->add_option("--k", rc.k, "Sample size (exact, gather)")->check(CLI::PositiveNumber);
  run_cmd->add_option("--k-lower", rc.k_lower, "Lower sample size bound (range)");
  run_cmd->add_option("--k-upper", rc.k_upper, "Upper sample size bound (range)");
  run_cmd->add_option("--b", rc.b, "Items per PE per batch")->check(CLI::PositiveNumber);
  run_cmd->add_option("--batches", rc.batches, "Mini-batches")->check(CLI::PositiveNumber);
  run_cmd->add_option("--mode", rc.mode, "weighted or uniform")
      ->transform(CLI::CheckedTransformer(modes));
  run_cmd->add_option("--select", select, "exact-<d>, range or gather");
  run_cmd->add_option("--pivots", rc.pivots, "Pivots per round for range selection")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--weights", rc.weights, "uniform or skewed")
      ->transform(CLI::CheckedTransformer(dists));
  run_cmd->add_option("--seed", rc.seed, "Master seed");
  run_cmd->add_option("--threads", rc.threads, "OS threads hosting the PEs")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", out_path, "CSV path; stdout if omitted");
  run_cmd->add_option("--run-id", rc.run_id, "Value of the run_id column");
  run_cmd->add_flag("--no-blocked", no_blocked, "Scalar skip scan only");
  run_cmd->add_flag("--no-local-threshold", no_local, "Disable first-batch local thresholds");

  distres::validation::Options vopts;
  std::string fault;
  CLI::App* val_cmd = app.add_subcommand("validate", "Run the acceptance battery");
  val_cmd->add_flag("--full", vopts.full, "Full problem sizes (slow)");
  val_cmd->add_option("--seed", vopts.seed, "Master seed");
  val_cmd->add_option("--threads", vopts.threads, "OS threads hosting the PEs")
      ->check(CLI::PositiveNumber);
  val_cmd->add_option("--only", vopts.only, "Criteria to run (1-11)")
      ->check(CLI::Range(1, distres::validation::kCriteria));
  val_cmd->add_option("--inject-fault", fault, "Corrupt the sampler: threshold")
      ->check(CLI::IsMember({"threshold"}));

  try {
    app.parse(argc, argv);
    if (*run_cmd) {
      const SelectFlag s = parse_select(select);
      rc.selection = s.selection;
      if (s.selection == distres::Selection::exact) rc.pivots = s.pivots;
      rc.blocked_skip = !no_blocked;
      rc.local_threshold = !no_local;
      rc.validate();
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  } catch (const distres::RangeError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*run_cmd) return run(rc, out_path);
    vopts.inject_threshold_fault = fault == "threshold";
    return validate(vopts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}
