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

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "distres/errors.hpp"

namespace distres {

/// Positive, finite item weight.
struct Weight {
  double value;
};

/// Sampling key. Smaller keys win; the k smallest keys form the sample.
struct Key {
  double value;
};

/// Uniform deviate from the half-open interval (0, 1].
struct UnitUniform {
  double value;
};

/// Global insertion cutoff. Unset until the first selection completes; the
/// negative sentinel mirrors the "no threshold yet" state of the stream.
class Threshold {
 public:
  constexpr Threshold() = default;

  static constexpr Threshold unset() { return Threshold{}; }
  static Threshold of(double value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw InvalidThreshold("threshold must be positive and finite");
    }
    Threshold t;
    t.value_ = value;
    return t;
  }

  [[nodiscard]] constexpr bool is_set() const { return value_ >= 0.0; }
  [[nodiscard]] double value() const {
    if (!is_set()) throw InvalidThreshold("threshold is unset");
    return value_;
  }
  /// Raw representation; negative when unset.
  [[nodiscard]] constexpr double raw() const { return value_; }

  friend constexpr bool operator==(Threshold, Threshold) = default;

 private:
  double value_ = -1.0;
};

/// Anything that hands out unit uniforms in (0, 1]. Rng is the production
/// source; FixedUniforms replays injected values in tests.
template <class S>
concept UnitSource = requires(S& s) {
  { s.next_unit() } -> std::convertible_to<double>;
};

/// Seedable 64-bit generator. Each (seed, stream) pair selects an
/// independent Mersenne Twister sequence.
class Rng {
 public:
  using result_type = std::uint64_t;

  Rng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  std::uint64_t next_u64() { return engine_(); }

  /// 53 random bits mapped to (0, 1]; never returns 0.
  double next_unit() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::uint64_t stream() const { return stream_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  std::uint64_t stream_;
};

/// Deterministic u-source cycling through a fixed list of values.
class FixedUniforms {
 public:
  explicit FixedUniforms(std::vector<double> values);
  double next_unit();
  [[nodiscard]] std::size_t consumed() const { return consumed_; }

 private:
  std::vector<double> values_;
  std::size_t consumed_ = 0;
};

namespace raw {

// Unchecked formulas shared by the checked API and the scan loops.

// The trailing + 0.0 folds -0 (from u = 1) into +0.
inline double exponential_key(double u, double w) {
  return -std::log(u) / w + 0.0;
}

inline double weighted_skip(double u, double t) { return -std::log(u) / t; }

/// -ln(rand[e^{-tw}, 1]) / w, evaluated as -log1p((u-1)(1-e^{-tw})) / w;
/// u = 1 maps exactly to 0. When e^{-tw} underflows the interval is
/// (0, 1] and the conditioning is vacuous.
inline double constrained_key(double u, double w, double t) {
  const double width = -std::expm1(-t * w);
  double key = -std::log1p((u - 1.0) * width) / w + 0.0;
  if (!(key < t)) key = std::nextafter(t, 0.0);
  return key;
}

inline std::uint64_t uniform_skip(double u, double t) {
  if (t >= 1.0) return 0;
  const double x = std::floor(std::log(u) / std::log1p(-t));
  if (!(x < 0x1.0p63)) return std::numeric_limits<std::uint64_t>::max() / 2;
  return static_cast<std::uint64_t>(x);
}

inline double uniform_constrained_key(double u, double t) { return u * t; }

}  // namespace raw

namespace detail {

inline void check_weight(Weight w) {
  if (!(w.value > 0.0) || !std::isfinite(w.value)) {
    throw InvalidWeight("weight must be positive and finite");
  }
}

inline double checked_threshold(Threshold t) {
  if (!t.is_set()) throw InvalidThreshold("threshold is unset");
  if (!(t.value() > 0.0)) throw InvalidThreshold("threshold must be positive");
  return t.value();
}

template <UnitSource S>
double draw(S& source) {
  const double u = source.next_unit();
  return u > 0.0 ? u : 1.0;
}

}  // namespace detail

/// Exponential(rate = w) variate: -ln(u) / w.
template <UnitSource S>
Key exponential_key(S& source, Weight w) {
  detail::check_weight(w);
  return Key{raw::exponential_key(detail::draw(source), w.value)};
}

/// Amount of weight to skip before the next insertion under threshold t;
/// Exponential(rate = t).
template <UnitSource S>
double weighted_skip(S& source, Threshold t) {
  const double tv = detail::checked_threshold(t);
  return raw::weighted_skip(detail::draw(source), tv);
}

/// Exponential(rate = w) variate conditioned to lie in [0, t).
template <UnitSource S>
Key constrained_key(S& source, Weight w, Threshold t) {
  detail::check_weight(w);
  const double tv = detail::checked_threshold(t);
  return Key{raw::constrained_key(detail::draw(source), w.value, tv)};
}

/// Number of items to jump over before the next insertion in uniform mode;
/// Geometric(success = t). Zero when t >= 1.
template <UnitSource S>
std::uint64_t uniform_skip(S& source, Threshold t) {
  const double tv = detail::checked_threshold(t);
  return raw::uniform_skip(detail::draw(source), tv);
}

/// Uniform key on (0, t].
template <UnitSource S>
Key uniform_constrained_key(S& source, Threshold t) {
  const double tv = detail::checked_threshold(t);
  return Key{raw::uniform_constrained_key(detail::draw(source), tv)};
}

}  // namespace distres
