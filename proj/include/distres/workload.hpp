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
#include <vector>

namespace distres {

/// uniform: weights uniform on (0, 100]. skewed: normal with standard
/// deviation 10 and mean 50 + batch + pe, non-positive draws redrawn.
enum class WeightDist { uniform, skewed };

/// Synthetic mini-batch stream. Every (batch, pe) share is generated from
/// its own random stream, so shares can be produced in any order.
class Workload {
 public:
  Workload(int p, std::uint64_t per_pe, WeightDist dist, std::uint64_t seed);

  /// Fills PE `pe`'s share of batch `batch`. Item ids are
  /// batch * b * p + pe * b + i, unique and increasing per PE.
  void fill(std::uint64_t batch, int pe, std::vector<double>& weights,
            std::vector<std::uint64_t>& ids) const;

  [[nodiscard]] int p() const { return p_; }
  [[nodiscard]] std::uint64_t per_pe() const { return b_; }

 private:
  int p_;
  std::uint64_t b_;
  WeightDist dist_;
  std::uint64_t seed_;
};

}  // namespace distres
