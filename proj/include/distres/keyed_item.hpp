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
#include <limits>
#include <ostream>

namespace distres {

/// An item id together with its sampling key. Items are totally ordered by
/// (key, origin_pe, item_id), so equal keys never make ranks ambiguous.
struct KeyedItem {
  double key = 0.0;
  std::uint32_t origin_pe = 0;
  std::uint64_t item_id = 0;

  friend constexpr bool operator<(const KeyedItem& a, const KeyedItem& b) {
    if (a.key != b.key) return a.key < b.key;
    if (a.origin_pe != b.origin_pe) return a.origin_pe < b.origin_pe;
    return a.item_id < b.item_id;
  }
  friend constexpr bool operator>(const KeyedItem& a, const KeyedItem& b) {
    return b < a;
  }
  friend constexpr bool operator<=(const KeyedItem& a, const KeyedItem& b) {
    return !(b < a);
  }
  friend constexpr bool operator>=(const KeyedItem& a, const KeyedItem& b) {
    return !(a < b);
  }
  friend constexpr bool operator==(const KeyedItem&, const KeyedItem&) = default;

  /// Compares above every real item; marks "no element" in reductions.
  static constexpr KeyedItem sentinel_high() {
    return {std::numeric_limits<double>::infinity(),
            std::numeric_limits<std::uint32_t>::max(),
            std::numeric_limits<std::uint64_t>::max()};
  }
  static constexpr KeyedItem sentinel_low() {
    return {-std::numeric_limits<double>::infinity(), 0, 0};
  }
  [[nodiscard]] constexpr bool is_sentinel() const {
    return key == std::numeric_limits<double>::infinity() ||
           key == -std::numeric_limits<double>::infinity();
  }
};

inline std::ostream& operator<<(std::ostream& os, const KeyedItem& item) {
  return os << '(' << item.key << ", pe " << item.origin_pe << ", id "
            << item.item_id << ')';
}

}  // namespace distres
