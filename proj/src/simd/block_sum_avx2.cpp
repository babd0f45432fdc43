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

// Built with -mavx2; only reached after a runtime CPU check.

#include <immintrin.h>

#include "distres/simd/block_sum.hpp"

namespace distres::simd {

double block_sum_avx2(const double* w) noexcept {
  __m256d a0 = _mm256_loadu_pd(w);
  __m256d a1 = _mm256_loadu_pd(w + 4);
  __m256d a2 = _mm256_loadu_pd(w + 8);
  __m256d a3 = _mm256_loadu_pd(w + 12);
  a0 = _mm256_add_pd(a0, _mm256_loadu_pd(w + 16));
  a1 = _mm256_add_pd(a1, _mm256_loadu_pd(w + 20));
  a2 = _mm256_add_pd(a2, _mm256_loadu_pd(w + 24));
  a3 = _mm256_add_pd(a3, _mm256_loadu_pd(w + 28));
  const __m256d s = _mm256_add_pd(_mm256_add_pd(a0, a1), _mm256_add_pd(a2, a3));
  const __m128d lo = _mm256_castpd256_pd128(s);
  const __m128d hi = _mm256_extractf128_pd(s, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

}  // namespace distres::simd
