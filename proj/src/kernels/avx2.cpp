// Copyright 2026 The skysum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <immintrin.h>

#include <bit>

#include "kernels_internal.hpp"

namespace skysum::kernels::detail {
namespace {

// Philox on four blocks at once. Each 64-bit lane carries one 32-bit counter
// word in its low half so _mm256_mul_epu32 yields the full 64-bit product.
void philox_fill_avx2(PhiloxKey key, std::uint64_t stream, std::uint64_t first_block,
                      std::uint32_t* out, std::size_t blocks) {
  const __m256i mask32 = _mm256_set1_epi64x(0xFFFFFFFFll);
  const __m256i m0 = _mm256_set1_epi64x(kPhiloxM0);
  const __m256i m1 = _mm256_set1_epi64x(kPhiloxM1);
  const __m256i s_lo = _mm256_set1_epi64x(static_cast<std::uint32_t>(stream));
  const __m256i s_hi = _mm256_set1_epi64x(static_cast<std::uint32_t>(stream >> 32));
  const __m256i lane_offsets = _mm256_set_epi64x(3, 2, 1, 0);

  __m256i round_k0[10];
  __m256i round_k1[10];
  PhiloxKey k = key;
  for (int r = 0; r < 10; ++r) {
    round_k0[r] = _mm256_set1_epi64x(k.k0);
    round_k1[r] = _mm256_set1_epi64x(k.k1);
    k.k0 += kPhiloxW0;
    k.k1 += kPhiloxW1;
  }

  std::size_t i = 0;
  for (; i + 4 <= blocks; i += 4) {
    const __m256i b = _mm256_add_epi64(
        _mm256_set1_epi64x(static_cast<long long>(first_block + i)), lane_offsets);
    __m256i c0 = _mm256_and_si256(b, mask32);
    __m256i c1 = _mm256_srli_epi64(b, 32);
    __m256i c2 = s_lo;
    __m256i c3 = s_hi;
    for (int r = 0; r < 10; ++r) {
      const __m256i p0 = _mm256_mul_epu32(c0, m0);
      const __m256i p1 = _mm256_mul_epu32(c2, m1);
      const __m256i hi0 = _mm256_srli_epi64(p0, 32);
      const __m256i lo0 = _mm256_and_si256(p0, mask32);
      const __m256i hi1 = _mm256_srli_epi64(p1, 32);
      const __m256i lo1 = _mm256_and_si256(p1, mask32);
      c0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), round_k0[r]);
      c1 = lo1;
      c2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), round_k1[r]);
      c3 = lo0;
    }
    // Lane b of w01 is (c0_b, c1_b) as two little-endian words; same for w23.
    const __m256i w01 = _mm256_or_si256(c0, _mm256_slli_epi64(c1, 32));
    const __m256i w23 = _mm256_or_si256(c2, _mm256_slli_epi64(c3, 32));
    const __m256i even = _mm256_unpacklo_epi64(w01, w23);  // blocks 0, 2
    const __m256i odd = _mm256_unpackhi_epi64(w01, w23);   // blocks 1, 3
    auto* dst = reinterpret_cast<__m256i*>(out + 4 * i);
    _mm256_storeu_si256(dst, _mm256_permute2x128_si256(even, odd, 0x20));
    _mm256_storeu_si256(dst + 1, _mm256_permute2x128_si256(even, odd, 0x31));
  }
  if (i < blocks) scalar_table().philox_fill(key, stream, first_block + i, out + 4 * i, blocks - i);
}

inline __m256i lt_u32(__m256i x, __m256i t) {
  const __m256i sign = _mm256_set1_epi32(static_cast<int>(0x80000000u));
  return _mm256_cmpgt_epi32(_mm256_xor_si256(t, sign), _mm256_xor_si256(x, sign));
}

// Eight pulses: returns their clamped counts in pulse order.
inline __m256i eight_pulses(const std::uint32_t* pairs, __m256i base, __m256i frac,
                            __m256i down, __m256i up) {
  const __m256 l0 = _mm256_castsi256_ps(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(pairs)));
  const __m256 l1 =
      _mm256_castsi256_ps(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(pairs + 8)));
  // a0 a1 a4 a5 | a2 a3 a6 a7 -> a0..a7
  const __m256i a = _mm256_permute4x64_epi64(
      _mm256_castps_si256(_mm256_shuffle_ps(l0, l1, _MM_SHUFFLE(2, 0, 2, 0))), 0xD8);
  const __m256i b = _mm256_permute4x64_epi64(
      _mm256_castps_si256(_mm256_shuffle_ps(l0, l1, _MM_SHUFFLE(3, 1, 3, 1))), 0xD8);
  const __m256i bern = lt_u32(a, frac);
  const __m256i minus = lt_u32(b, down);
  const __m256i plus = lt_u32(_mm256_sub_epi32(b, down), up);
  // Comparison masks are -1 when true.
  __m256i c = _mm256_sub_epi32(base, bern);
  c = _mm256_add_epi32(c, minus);
  c = _mm256_sub_epi32(c, plus);
  return _mm256_max_epi32(c, _mm256_setzero_si256());
}

void pulse_counts_avx2(const std::uint32_t* pairs, std::size_t n, PulseThresholds th,
                       std::int32_t* out) {
  const __m256i base = _mm256_set1_epi32(th.base);
  const __m256i frac = _mm256_set1_epi32(static_cast<int>(th.frac));
  const __m256i down = _mm256_set1_epi32(static_cast<int>(th.down));
  const __m256i up = _mm256_set1_epi32(static_cast<int>(th.up));
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i),
                        eight_pulses(pairs + 2 * i, base, frac, down, up));
  }
  if (i < n) scalar_table().pulse_counts(pairs + 2 * i, n - i, th, out + i);
}

std::int64_t pulse_count_sum_avx2(const std::uint32_t* pairs, std::size_t n,
                                  PulseThresholds th) {
  const __m256i base = _mm256_set1_epi32(th.base);
  const __m256i frac = _mm256_set1_epi32(static_cast<int>(th.frac));
  const __m256i down = _mm256_set1_epi32(static_cast<int>(th.down));
  const __m256i up = _mm256_set1_epi32(static_cast<int>(th.up));
  __m256i acc_lo = _mm256_setzero_si256();
  __m256i acc_hi = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i c = eight_pulses(pairs + 2 * i, base, frac, down, up);
    acc_lo = _mm256_add_epi64(acc_lo, _mm256_cvtepi32_epi64(_mm256_castsi256_si128(c)));
    acc_hi = _mm256_add_epi64(acc_hi, _mm256_cvtepi32_epi64(_mm256_extracti128_si256(c, 1)));
  }
  alignas(32) std::int64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), _mm256_add_epi64(acc_lo, acc_hi));
  std::int64_t total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  if (i < n) total += scalar_table().pulse_count_sum(pairs + 2 * i, n - i, th);
  return total;
}

void translate_avx2(double* x, double* y, std::size_t n, double dx, double dy) {
  const __m256d vdx = _mm256_set1_pd(dx);
  const __m256d vdy = _mm256_set1_pd(dy);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_add_pd(_mm256_loadu_pd(x + i), vdx));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), vdy));
  }
  if (i < n) scalar_table().translate(x + i, y + i, n - i, dx, dy);
}

inline unsigned inside_mask(const double* x, const double* y, __m256d x0, __m256d x1, __m256d y0,
                            __m256d y1) {
  const __m256d vx = _mm256_loadu_pd(x);
  const __m256d vy = _mm256_loadu_pd(y);
  __m256d in = _mm256_and_pd(_mm256_cmp_pd(vx, x0, _CMP_GE_OQ), _mm256_cmp_pd(vx, x1, _CMP_LE_OQ));
  in = _mm256_and_pd(in, _mm256_cmp_pd(vy, y0, _CMP_GE_OQ));
  in = _mm256_and_pd(in, _mm256_cmp_pd(vy, y1, _CMP_LE_OQ));
  return static_cast<unsigned>(_mm256_movemask_pd(in));
}

inline unsigned alive_mask(const std::uint8_t* alive) {
  return static_cast<unsigned>(alive[0] != 0) | (static_cast<unsigned>(alive[1] != 0) << 1) |
         (static_cast<unsigned>(alive[2] != 0) << 2) | (static_cast<unsigned>(alive[3] != 0) << 3);
}

std::size_t cull_outside_avx2(const double* x, const double* y, std::uint8_t* alive,
                              std::size_t n, Rect r) {
  const __m256d x0 = _mm256_set1_pd(r.x0), x1 = _mm256_set1_pd(r.x1);
  const __m256d y0 = _mm256_set1_pd(r.y0), y1 = _mm256_set1_pd(r.y1);
  std::size_t culled = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const unsigned kill = alive_mask(alive + i) & ~inside_mask(x + i, y + i, x0, x1, y0, y1) & 0xFu;
    if (kill == 0) continue;
    for (unsigned k = 0; k < 4; ++k) {
      if (kill & (1u << k)) alive[i + k] = 0;
    }
    culled += static_cast<std::size_t>(std::popcount(kill));
  }
  if (i < n) culled += scalar_table().cull_outside(x + i, y + i, alive + i, n - i, r);
  return culled;
}

std::size_t count_in_rect_avx2(const double* x, const double* y, const std::uint8_t* alive,
                               std::size_t n, Rect r) {
  const __m256d x0 = _mm256_set1_pd(r.x0), x1 = _mm256_set1_pd(r.x1);
  const __m256d y0 = _mm256_set1_pd(r.y0), y1 = _mm256_set1_pd(r.y1);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    count += static_cast<std::size_t>(
        std::popcount(alive_mask(alive + i) & inside_mask(x + i, y + i, x0, x1, y0, y1)));
  }
  if (i < n) count += scalar_table().count_in_rect(x + i, y + i, alive + i, n - i, r);
  return count;
}

void accumulate_rows_avx2(const double* w, const double* x, std::size_t rows, std::size_t cols,
                          double* out) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = w + i * cols;
    const __m256d xi = _mm256_set1_pd(x[i]);
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(row + j), xi);
      _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_loadu_pd(out + j), prod));
    }
    for (; j < cols; ++j) out[j] = out[j] + row[j] * x[i];
  }
}

}  // namespace

const KernelTable& avx2_table() noexcept {
  static const KernelTable t{Backend::avx2,       philox_fill_avx2,   pulse_counts_avx2,
                             pulse_count_sum_avx2, translate_avx2,     cull_outside_avx2,
                             count_in_rect_avx2,   accumulate_rows_avx2};
  return t;
}

}  // namespace skysum::kernels::detail
