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

#include <array>
#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <type_traits>
#include <typeinfo>
#include <vector>

#include "distres/errors.hpp"
#include "distres/keyed_item.hpp"

// In-process SPMD collectives.
//
// run_spmd() executes one body per logical PE. PEs are cooperative fibers
// multiplexed over a configurable number of OS threads; a collective is a
// blocking rendezvous that suspends the calling fiber until every PE of the
// group has arrived. The last PE to arrive combines the contributions in rank
// order, so results never depend on scheduling.
//
// Communication cost is tracked as counters following the alpha/beta model:
// a broadcast or all-reduce of an l-word message costs l words, a gather
// costs the total number of words received at the root.

namespace distres {

enum class CollectiveKind : std::uint8_t { broadcast, all_reduce, gather };

struct CommCounters {
  std::uint64_t broadcasts = 0;
  std::uint64_t all_reduces = 0;
  std::uint64_t gathers = 0;
  std::uint64_t words = 0;

  [[nodiscard]] std::uint64_t collectives() const {
    return broadcasts + all_reduces + gathers;
  }
  friend CommCounters operator-(const CommCounters& a, const CommCounters& b) {
    return {a.broadcasts - b.broadcasts, a.all_reduces - b.all_reduces,
            a.gathers - b.gathers, a.words - b.words};
  }
  friend CommCounters operator+(const CommCounters& a, const CommCounters& b) {
    return {a.broadcasts + b.broadcasts, a.all_reduces + b.all_reduces,
            a.gathers + b.gathers, a.words + b.words};
  }
  friend bool operator==(const CommCounters&, const CommCounters&) = default;
};

/// Reduction operators. Combination always happens in rank order.
namespace ops {

struct Sum {
  template <class T>
  T operator()(const T& a, const T& b) const {
    return a + b;
  }
};

struct Min {
  template <class T>
  T operator()(const T& a, const T& b) const {
    return b < a ? b : a;
  }
};

struct Max {
  template <class T>
  T operator()(const T& a, const T& b) const {
    return a < b ? b : a;
  }
};

/// Smallest keyed item under the (key, pe, id) total order.
struct MinByKey {
  KeyedItem operator()(const KeyedItem& a, const KeyedItem& b) const {
    return b < a ? b : a;
  }
};

}  // namespace ops

namespace comm_detail {

struct Contribution {
  CollectiveKind kind;
  int root;
  std::size_t op_tag;
  std::size_t count;
  std::size_t words;
  const void* payload;
};

using Combine = std::shared_ptr<const void> (*)(
    std::span<const Contribution> all, const void* ctx);

template <class T>
constexpr std::size_t words_of(std::size_t count) {
  return (sizeof(T) * count + 7) / 8;
}

struct PeContext;

}  // namespace comm_detail

class PeHandle;

/// Shared rendezvous state of p PEs.
class Group {
 public:
  explicit Group(int p);
  Group(const Group&) = delete;
  Group& operator=(const Group&) = delete;

  [[nodiscard]] int size() const { return p_; }
  [[nodiscard]] CommCounters counters() const;
  [[nodiscard]] bool aborted() const { return aborted_.load(); }

 private:
  friend class PeHandle;
  friend struct SpmdRunner;

  std::shared_ptr<const void> rendezvous(comm_detail::PeContext& pe,
                                         const comm_detail::Contribution& c,
                                         comm_detail::Combine combine,
                                         const void* ctx);
  void depart(int rank, bool failed, const std::string& why);
  void abort_locked(std::string reason);
  [[nodiscard]] std::uint64_t generation() const { return generation_.load(); }
  void wait_for_change(std::uint64_t seen);

  int p_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::vector<comm_detail::Contribution> arrivals_;
  std::size_t arrived_ = 0;
  int departed_ = 0;
  std::atomic<std::uint64_t> generation_{0};
  std::atomic<bool> aborted_{false};
  std::string abort_reason_;
  std::array<std::shared_ptr<const void>, 2> results_;
  CommCounters counters_;
};

/// A PE's view of its group. Not shareable between threads.
class PeHandle {
 public:
  PeHandle(Group& group, comm_detail::PeContext& context, int rank)
      : group_(&group), context_(&context), rank_(rank) {}

  [[nodiscard]] int rank() const { return rank_; }
  [[nodiscard]] int size() const { return group_->size(); }
  [[nodiscard]] CommCounters counters() const { return group_->counters(); }

  /// Every PE returns the root's value.
  template <class T>
  T broadcast(const T& value, int root) {
    static_assert(std::is_trivially_copyable_v<T>);
    check_root(root);
    const comm_detail::Contribution c{CollectiveKind::broadcast, root, 0, 1,
                                      comm_detail::words_of<T>(1), &value};
    auto result = group_->rendezvous(
        *context_, c,
        [](std::span<const comm_detail::Contribution> all,
           const void*) -> std::shared_ptr<const void> {
          const int r = all[0].root;
          return std::make_shared<T>(*static_cast<const T*>(all[r].payload));
        },
        nullptr);
    return *static_cast<const T*>(result.get());
  }

  /// Folds every PE's value with `op` in rank order; every PE gets the
  /// result.
  template <class T, class Op>
  T all_reduce(const T& value, Op op) {
    static_assert(std::is_trivially_copyable_v<T>);
    const comm_detail::Contribution c{CollectiveKind::all_reduce, 0,
                                      typeid(Op).hash_code(), 1,
                                      comm_detail::words_of<T>(1), &value};
    auto result = group_->rendezvous(
        *context_, c,
        [](std::span<const comm_detail::Contribution> all,
           const void* ctx) -> std::shared_ptr<const void> {
          const Op& fn = *static_cast<const Op*>(ctx);
          T acc = *static_cast<const T*>(all[0].payload);
          for (std::size_t r = 1; r < all.size(); ++r) {
            acc = fn(acc, *static_cast<const T*>(all[r].payload));
          }
          return std::make_shared<T>(acc);
        },
        &op);
    return *static_cast<const T*>(result.get());
  }

  /// Element-wise all-reduce of equally long vectors.
  template <class T, class Op>
  std::vector<T> all_reduce(std::span<const T> values, Op op) {
    static_assert(std::is_trivially_copyable_v<T>);
    const comm_detail::Contribution c{
        CollectiveKind::all_reduce, 0, typeid(Op).hash_code(), values.size(),
        comm_detail::words_of<T>(values.size()), values.data()};
    auto result = group_->rendezvous(
        *context_, c,
        [](std::span<const comm_detail::Contribution> all,
           const void* ctx) -> std::shared_ptr<const void> {
          const Op& fn = *static_cast<const Op*>(ctx);
          const std::size_t n = all[0].count;
          const T* first = static_cast<const T*>(all[0].payload);
          auto acc = std::make_shared<std::vector<T>>(first, first + n);
          for (std::size_t r = 1; r < all.size(); ++r) {
            const T* v = static_cast<const T*>(all[r].payload);
            for (std::size_t i = 0; i < n; ++i) (*acc)[i] = fn((*acc)[i], v[i]);
          }
          return acc;
        },
        &op);
    return *static_cast<const std::vector<T>*>(result.get());
  }

  template <class T, class Op>
  std::vector<T> all_reduce(const std::vector<T>& values, Op op) {
    return all_reduce(std::span<const T>(values), op);
  }

  /// Concatenation of all PEs' values in rank order at `root`; other PEs
  /// receive an empty vector.
  template <class T>
  std::vector<T> gather(std::span<const T> values, int root) {
    static_assert(std::is_trivially_copyable_v<T>);
    check_root(root);
    const comm_detail::Contribution c{
        CollectiveKind::gather, root, sizeof(T), values.size(),
        comm_detail::words_of<T>(values.size()), values.data()};
    auto result = group_->rendezvous(
        *context_, c,
        [](std::span<const comm_detail::Contribution> all,
           const void*) -> std::shared_ptr<const void> {
          auto out = std::make_shared<std::vector<T>>();
          std::size_t total = 0;
          for (const auto& a : all) total += a.count;
          out->reserve(total);
          for (const auto& a : all) {
            const T* v = static_cast<const T*>(a.payload);
            out->insert(out->end(), v, v + a.count);
          }
          return out;
        },
        nullptr);
    if (rank_ != root) return {};
    return *static_cast<const std::vector<T>*>(result.get());
  }

  template <class T>
  std::vector<T> gather(const std::vector<T>& values, int root) {
    return gather(std::span<const T>(values), root);
  }

 private:
  void check_root(int root) const {
    if (root < 0 || root >= size()) {
      throw RangeError("collective root " + std::to_string(root) +
                       " outside the group");
    }
  }

  Group* group_;
  comm_detail::PeContext* context_;
  int rank_;
};

struct SpmdOptions {
  /// OS threads hosting the PE fibers; clamped to [1, p].
  int threads = 1;
  std::size_t stack_bytes = 256 * 1024;
};

/// Runs `body` once per PE of a fresh group of size p and returns the
/// group's final counters. If any PE throws, the remaining PEs are released
/// with ProtocolViolation and the first original exception (lowest rank) is
/// rethrown.
CommCounters run_spmd(int p, const std::function<void(PeHandle&)>& body,
                      SpmdOptions options = {});

}  // namespace distres
