// Copyright 2026 The bellaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bellaudit/kernels/kernels.hpp"

#if BELLAUDIT_HAVE_AVX2_KERNELS

#include <immintrin.h>

#include <cmath>

// Functions carry target attributes instead of compiling the file with
// -mavx2, so no AVX2 code leaks into inline functions shared with other TUs.
#define BELLAUDIT_AVX2 __attribute__((target("avx2,popcnt")))

namespace bellaudit::kernels::avx2 {

namespace {

BELLAUDIT_AVX2 inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

// Cephes-style exp: range reduction by ln2 split in two parts, then a
// (3,3) Pade form on [-ln2/2, ln2/2]. Inputs below -708 flush to zero.
BELLAUDIT_AVX2 inline __m256d exp_pd(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125E-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212E-6);
  const __m256d p0 = _mm256_set1_pd(1.26177193074810590878E-4);
  const __m256d p1 = _mm256_set1_pd(3.02994407707441961300E-2);
  const __m256d p2 = _mm256_set1_pd(9.99999999999999999910E-1);
  const __m256d q0 = _mm256_set1_pd(3.00198505138664455042E-6);
  const __m256d q1 = _mm256_set1_pd(2.52448340349684104192E-3);
  const __m256d q2 = _mm256_set1_pd(2.27265548208155028766E-1);
  const __m256d q3 = _mm256_set1_pd(2.00000000000000000009E0);
  const __m256d lo_limit = _mm256_set1_pd(-708.0);
  const __m256d hi_limit = _mm256_set1_pd(709.0);

  const __m256d underflow = _mm256_cmp_pd(x, lo_limit, _CMP_LT_OQ);
  x = _mm256_max_pd(_mm256_min_pd(x, hi_limit), lo_limit);

  __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(n, c1));
  r = _mm256_sub_pd(r, _mm256_mul_pd(n, c2));

  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d px = _mm256_add_pd(_mm256_mul_pd(p0, rr), p1);
  px = _mm256_add_pd(_mm256_mul_pd(px, rr), p2);
  px = _mm256_mul_pd(px, r);
  __m256d qx = _mm256_add_pd(_mm256_mul_pd(q0, rr), q1);
  qx = _mm256_add_pd(_mm256_mul_pd(qx, rr), q2);
  qx = _mm256_add_pd(_mm256_mul_pd(qx, rr), q3);
  __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  e = _mm256_add_pd(_mm256_set1_pd(1.0), _mm256_add_pd(e, e));

  // 2^n via the exponent field; n is in [-1022, 1023] after clamping.
  __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(underflow, e);
}

}  // namespace

BELLAUDIT_AVX2 KeyCounts count_keys(std::span<const std::uint8_t> keys) {
  KeyCounts counts{};
  const std::size_t n = keys.size();
  std::size_t i = 0;
  const __m256i k0 = _mm256_set1_epi8(0);
  const __m256i k1 = _mm256_set1_epi8(1);
  const __m256i k2 = _mm256_set1_epi8(2);
  const __m256i k3 = _mm256_set1_epi8(3);
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(keys.data() + i));
    counts[0] += static_cast<unsigned>(
        __builtin_popcount(static_cast<unsigned>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(v, k0)))));
    counts[1] += static_cast<unsigned>(
        __builtin_popcount(static_cast<unsigned>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(v, k1)))));
    counts[2] += static_cast<unsigned>(
        __builtin_popcount(static_cast<unsigned>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(v, k2)))));
    counts[3] += static_cast<unsigned>(
        __builtin_popcount(static_cast<unsigned>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(v, k3)))));
  }
  for (; i < n; ++i) {
    if (keys[i] < 4) ++counts[keys[i]];
  }
  return counts;
}

BELLAUDIT_AVX2 void accumulate_bins(std::span<const double> values, double origin, double width,
                                    std::span<std::uint64_t> counts, BinOverflow& overflow) {
  const std::size_t n = values.size();
  const double nbins = static_cast<double>(counts.size());
  const __m256d vorigin = _mm256_set1_pd(origin);
  const __m256d vwidth = _mm256_set1_pd(width);
  const __m256d vzero = _mm256_setzero_pd();
  const __m256d vnbins = _mm256_set1_pd(nbins);
  alignas(32) double idx[4];
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(values.data() + i);
    __m256d b = _mm256_floor_pd(_mm256_div_pd(_mm256_sub_pd(v, vorigin), vwidth));
    const int below = _mm256_movemask_pd(_mm256_cmp_pd(b, vzero, _CMP_NGE_UQ));
    const int above = _mm256_movemask_pd(_mm256_cmp_pd(b, vnbins, _CMP_GE_OQ));
    _mm256_store_pd(idx, b);
    for (int lane = 0; lane < 4; ++lane) {
      if (below & (1 << lane)) {
        ++overflow.below;
      } else if (above & (1 << lane)) {
        ++overflow.above;
      } else {
        ++counts[static_cast<std::size_t>(idx[lane])];
      }
    }
  }
  for (; i < n; ++i) {
    double b = std::floor((values[i] - origin) / width);
    if (!(b >= 0.0)) {
      ++overflow.below;
    } else if (b >= nbins) {
      ++overflow.above;
    } else {
      ++counts[static_cast<std::size_t>(b)];
    }
  }
}

BELLAUDIT_AVX2 double sum_exp(std::span<const double> x, double shift) {
  const std::size_t n = x.size();
  const __m256d vshift = _mm256_set1_pd(shift);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, exp_pd(_mm256_sub_pd(_mm256_loadu_pd(x.data() + i), vshift)));
  }
  double total = hsum(acc);
  for (; i < n; ++i) total += std::exp(x[i] - shift);
  return total;
}

BELLAUDIT_AVX2 ShapeTerms shape_terms(std::span<const double> x, std::span<const double> y,
                                      double s) {
  const std::size_t n = x.size();
  const __m256d vs = _mm256_set1_pd(s);
  const __m256d vs2 = _mm256_set1_pd(s * s);
  const __m256d vzero = _mm256_setzero_pd();
  const __m256d vone = _mm256_set1_pd(1.0);
  __m256d chi2 = _mm256_setzero_pd();
  __m256d g = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x.data() + i);
    const __m256d yv = _mm256_loadu_pd(y.data() + i);
    __m256d den = _mm256_add_pd(xv, _mm256_mul_pd(vs2, yv));
    const __m256d zero_den = _mm256_cmp_pd(den, vzero, _CMP_EQ_OQ);
    den = _mm256_blendv_pd(den, vone, zero_den);
    const __m256d num = _mm256_sub_pd(xv, _mm256_mul_pd(vs, yv));
    __m256d c = _mm256_div_pd(_mm256_mul_pd(num, num), den);
    __m256d gt = _mm256_div_pd(_mm256_mul_pd(_mm256_mul_pd(xv, yv), num), _mm256_mul_pd(den, den));
    chi2 = _mm256_add_pd(chi2, _mm256_andnot_pd(zero_den, c));
    g = _mm256_add_pd(g, _mm256_andnot_pd(zero_den, gt));
  }
  ShapeTerms t{hsum(chi2), hsum(g)};
  const double s2 = s * s;
  for (; i < n; ++i) {
    const double den = x[i] + s2 * y[i];
    if (den == 0.0) continue;
    const double num = x[i] - s * y[i];
    t.chi2 += num * num / den;
    t.g += x[i] * y[i] * num / (den * den);
  }
  return t;
}

}  // namespace bellaudit::kernels::avx2

#endif  // BELLAUDIT_HAVE_AVX2_KERNELS
