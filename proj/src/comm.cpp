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

#include "distres/comm.hpp"

#include <algorithm>
#include <exception>
#include <thread>
#include <utility>

#include <boost/context/fiber.hpp>
#include <boost/context/fixedsize_stack.hpp>

namespace distres {

namespace comm_detail {

struct PeContext {
  int rank = 0;
  bool started = false;
  bool done = false;
  std::uint64_t wait_generation = 0;
  boost::context::fiber fiber;   // the PE, as seen from its worker
  boost::context::fiber caller;  // the worker, as seen from the PE
  std::exception_ptr error;
};

namespace {

const char* kind_name(CollectiveKind k) {
  switch (k) {
    case CollectiveKind::broadcast:
      return "broadcast";
    case CollectiveKind::all_reduce:
      return "all_reduce";
    case CollectiveKind::gather:
      return "gather";
  }
  return "?";
}

void suspend(PeContext& pe, std::uint64_t until) {
  pe.wait_generation = until;
  pe.caller = std::move(pe.caller).resume();
}

}  // namespace
}  // namespace comm_detail

using comm_detail::Contribution;
using comm_detail::PeContext;

Group::Group(int p) : p_(p), arrivals_(p > 0 ? static_cast<std::size_t>(p) : 0) {
  if (p < 1) throw RangeError("group size must be at least 1");
}

CommCounters Group::counters() const {
  std::lock_guard lock(mu_);
  return counters_;
}

void Group::abort_locked(std::string reason) {
  if (aborted_.load()) return;
  abort_reason_ = std::move(reason);
  aborted_.store(true);
  cv_.notify_all();
}

std::shared_ptr<const void> Group::rendezvous(PeContext& pe,
                                              const Contribution& c,
                                              comm_detail::Combine combine,
                                              const void* ctx) {
  std::unique_lock lock(mu_);
  if (aborted_.load()) throw ProtocolViolation(abort_reason_);
  if (departed_ > 0) {
    abort_locked("PE " + std::to_string(pe.rank) + " entered a " +
                 comm_detail::kind_name(c.kind) +
                 " after another PE had left the group");
    throw ProtocolViolation(abort_reason_);
  }
  const std::uint64_t gen = generation_.load();
  arrivals_[static_cast<std::size_t>(pe.rank)] = c;
  if (++arrived_ < static_cast<std::size_t>(p_)) {
    lock.unlock();
    comm_detail::suspend(pe, gen + 1);
    lock.lock();
    if (generation_.load() > gen) return results_[gen & 1];
    throw ProtocolViolation(abort_reason_);
  }

  // Last arriver: validate, combine, publish.
  const Contribution& first = arrivals_[0];
  for (int r = 1; r < p_; ++r) {
    const Contribution& a = arrivals_[static_cast<std::size_t>(r)];
    std::string what;
    if (a.kind != first.kind) {
      what = std::string("PE 0 called ") + comm_detail::kind_name(first.kind) +
             " but PE " + std::to_string(r) + " called " +
             comm_detail::kind_name(a.kind);
    } else if (a.root != first.root) {
      what = "PEs disagree on the root of a " +
             std::string(comm_detail::kind_name(a.kind));
    } else if (a.op_tag != first.op_tag) {
      what = "PEs disagree on the operator or element type of a " +
             std::string(comm_detail::kind_name(a.kind));
    } else if (a.kind == CollectiveKind::all_reduce && a.count != first.count) {
      what = "all_reduce operands differ in length";
    }
    if (!what.empty()) {
      abort_locked(what);
      throw ProtocolViolation(abort_reason_);
    }
  }

  std::shared_ptr<const void> result;
  try {
    result = combine(std::span<const Contribution>(arrivals_), ctx);
  } catch (...) {
    abort_locked("combining a collective failed");
    throw;
  }

  switch (first.kind) {
    case CollectiveKind::broadcast:
      ++counters_.broadcasts;
      counters_.words += arrivals_[static_cast<std::size_t>(first.root)].words;
      break;
    case CollectiveKind::all_reduce:
      ++counters_.all_reduces;
      counters_.words += first.words;
      break;
    case CollectiveKind::gather:
      ++counters_.gathers;
      for (int r = 0; r < p_; ++r) {
        if (r != first.root) counters_.words += arrivals_[static_cast<std::size_t>(r)].words;
      }
      break;
  }

  results_[gen & 1] = result;
  arrived_ = 0;
  generation_.store(gen + 1);
  cv_.notify_all();
  return result;
}

void Group::depart(int rank, bool failed, const std::string& why) {
  std::lock_guard lock(mu_);
  ++departed_;
  if (failed) {
    abort_locked("PE " + std::to_string(rank) + " failed: " + why);
  } else if (arrived_ > 0) {
    abort_locked("PE " + std::to_string(rank) +
                 " left the group while a collective was pending");
  }
}

void Group::wait_for_change(std::uint64_t seen) {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return generation_.load() != seen || aborted_.load(); });
}

struct SpmdRunner {
  Group& group;
  const std::function<void(PeHandle&)>& body;
  std::size_t stack_bytes;

  void start(PeContext& pe) {
    pe.started = true;
    pe.fiber = boost::context::fiber(
        std::allocator_arg, boost::context::fixedsize_stack(stack_bytes),
        [this, &pe](boost::context::fiber&& caller) {
          pe.caller = std::move(caller);
          std::string why;
          try {
            PeHandle handle(group, pe, pe.rank);
            body(handle);
          } catch (const boost::context::detail::forced_unwind&) {
            throw;
          } catch (const std::exception& e) {
            pe.error = std::current_exception();
            why = e.what();
          } catch (...) {
            pe.error = std::current_exception();
            why = "unknown exception";
          }
          group.depart(pe.rank, pe.error != nullptr, why);
          pe.done = true;
          return std::move(pe.caller);
        });
    pe.fiber = std::move(pe.fiber).resume();
  }

  bool runnable(const PeContext& pe) const {
    if (pe.done) return false;
    if (!pe.started) return true;
    return group.generation() >= pe.wait_generation || group.aborted();
  }

  void work(std::vector<PeContext*> mine) {
    std::size_t alive = mine.size();
    while (alive > 0) {
      const std::uint64_t seen = group.generation();
      bool progressed = false;
      for (PeContext* pe : mine) {
        if (!runnable(*pe)) continue;
        progressed = true;
        if (!pe->started) {
          start(*pe);
        } else {
          pe->fiber = std::move(pe->fiber).resume();
        }
        if (pe->done) --alive;
      }
      if (!progressed) group.wait_for_change(seen);
    }
  }
};

CommCounters run_spmd(int p, const std::function<void(PeHandle&)>& body,
                      SpmdOptions options) {
  Group group(p);
  std::vector<PeContext> contexts(static_cast<std::size_t>(p));
  for (int r = 0; r < p; ++r) contexts[static_cast<std::size_t>(r)].rank = r;

  const int t = std::clamp(options.threads, 1, p);
  std::vector<std::vector<PeContext*>> assignment(static_cast<std::size_t>(t));
  for (int r = 0; r < p; ++r) {
    assignment[static_cast<std::size_t>(r % t)].push_back(
        &contexts[static_cast<std::size_t>(r)]);
  }

  SpmdRunner runner{group, body, options.stack_bytes};
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(t - 1));
  for (int w = 1; w < t; ++w) {
    threads.emplace_back([&runner, &assignment, w] {
      runner.work(assignment[static_cast<std::size_t>(w)]);
    });
  }
  runner.work(assignment[0]);
  for (auto& th : threads) th.join();

  std::exception_ptr first_protocol;
  for (const auto& pe : contexts) {
    if (!pe.error) continue;
    try {
      std::rethrow_exception(pe.error);
    } catch (const ProtocolViolation&) {
      if (!first_protocol) first_protocol = pe.error;
    } catch (...) {
      throw;
    }
  }
  if (first_protocol) std::rethrow_exception(first_protocol);
  return group.counters();
}

}  // namespace distres
