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

#include "distres/simd/block_sum.hpp"

#if defined(__aarch64__) || defined(__ARM_NEON)
#include <arm_neon.h>
#endif

namespace distres::simd {

double block_sum_scalar(const double* w) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < kBlock; ++i) s += w[i];
  return s;
}

#if defined(__aarch64__) || defined(__ARM_NEON)
double block_sum_neon(const double* w) noexcept {
  float64x2_t a0 = vld1q_f64(w);
  float64x2_t a1 = vld1q_f64(w + 2);
  float64x2_t a2 = vld1q_f64(w + 4);
  float64x2_t a3 = vld1q_f64(w + 6);
  for (std::size_t i = 8; i < kBlock; i += 8) {
    a0 = vaddq_f64(a0, vld1q_f64(w + i));
    a1 = vaddq_f64(a1, vld1q_f64(w + i + 2));
    a2 = vaddq_f64(a2, vld1q_f64(w + i + 4));
    a3 = vaddq_f64(a3, vld1q_f64(w + i + 6));
  }
  return vaddvq_f64(vaddq_f64(vaddq_f64(a0, a1), vaddq_f64(a2, a3)));
}
#endif

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(DISTRES_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__) || defined(__ARM_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

BlockSumFn block_sum_for(Isa isa) noexcept {
  if (!isa_available(isa)) return nullptr;
  switch (isa) {
    case Isa::scalar:
      return &block_sum_scalar;
#if defined(DISTRES_HAVE_AVX2)
    case Isa::avx2:
      return &block_sum_avx2;
#endif
#if defined(__aarch64__) || defined(__ARM_NEON)
    case Isa::neon:
      return &block_sum_neon;
#endif
    default:
      return nullptr;
  }
}

Isa best_isa() noexcept {
  static const Isa best = [] {
    if (isa_available(Isa::avx2)) return Isa::avx2;
    if (isa_available(Isa::neon)) return Isa::neon;
    return Isa::scalar;
  }();
  return best;
}

const char* isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

}  // namespace distres::simd
