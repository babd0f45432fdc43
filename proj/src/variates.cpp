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

#include "distres/variates.hpp"

#include <utility>

namespace distres {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32),
                    0x6a09e667u};
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(make_engine(seed, stream)), seed_(seed), stream_(stream) {}

FixedUniforms::FixedUniforms(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty()) throw RangeError("FixedUniforms needs at least one value");
  for (double u : values_) {
    if (!(u > 0.0 && u <= 1.0)) {
      throw RangeError("injected uniforms must lie in (0, 1]");
    }
  }
}

double FixedUniforms::next_unit() {
  const double u = values_[consumed_ % values_.size()];
  ++consumed_;
  return u;
}

}  // namespace distres
