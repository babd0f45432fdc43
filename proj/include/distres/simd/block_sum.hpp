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

#include <cstddef>

// Sum of a fixed-size block of weights, used by the blocked skip scan.
// block_sum_scalar is the reference; vector variants must agree with it
// exactly on integer-valued inputs and to rounding otherwise.

namespace distres::simd {

inline constexpr std::size_t kBlock = 32;

enum class Isa { scalar, avx2, neon };

using BlockSumFn = double (*)(const double* w) noexcept;

double block_sum_scalar(const double* w) noexcept;

#if defined(DISTRES_HAVE_AVX2)
double block_sum_avx2(const double* w) noexcept;
#endif

#if defined(__aarch64__) || defined(__ARM_NEON)
double block_sum_neon(const double* w) noexcept;
#endif

/// True when the kernel was compiled in and the running CPU supports it.
bool isa_available(Isa isa) noexcept;

/// Kernel for `isa`, or nullptr when unavailable.
BlockSumFn block_sum_for(Isa isa) noexcept;

/// Widest available instruction set, detected once at first use.
Isa best_isa() noexcept;

inline BlockSumFn block_sum() noexcept { return block_sum_for(best_isa()); }

const char* isa_name(Isa isa) noexcept;

}  // namespace distres::simd
