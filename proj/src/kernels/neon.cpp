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

#include <arm_neon.h>

#include "kernels_internal.hpp"

namespace skysum::kernels::detail {
namespace {

// Two Philox blocks per iteration; vmull_u32 gives the 64-bit products.
void philox_fill_neon(PhiloxKey key, std::uint64_t stream, std::uint64_t first_block,
                      std::uint32_t* out, std::size_t blocks) {
  const uint32x2_t m0 = vdup_n_u32(kPhiloxM0);
  const uint32x2_t m1 = vdup_n_u32(kPhiloxM1);
  const uint32x2_t s_lo = vdup_n_u32(static_cast<std::uint32_t>(stream));
  const uint32x2_t s_hi = vdup_n_u32(static_cast<std::uint32_t>(stream >> 32));

  std::size_t i = 0;
  for (; i + 2 <= blocks; i += 2) {
    const std::uint64_t b0 = first_block + i;
    const std::uint64_t b1 = b0 + 1;
    const std::uint32_t lo[2] = {static_cast<std::uint32_t>(b0), static_cast<std::uint32_t>(b1)};
    const std::uint32_t hi[2] = {static_cast<std::uint32_t>(b0 >> 32),
                                 static_cast<std::uint32_t>(b1 >> 32)};
    uint32x2_t c0 = vld1_u32(lo);
    uint32x2_t c1 = vld1_u32(hi);
    uint32x2_t c2 = s_lo;
    uint32x2_t c3 = s_hi;
    PhiloxKey k = key;
    for (int r = 0; r < 10; ++r) {
      const uint64x2_t p0 = vmull_u32(c0, m0);
      const uint64x2_t p1 = vmull_u32(c2, m1);
      const uint32x2_t hi0 = vshrn_n_u64(p0, 32);
      const uint32x2_t lo0 = vmovn_u64(p0);
      const uint32x2_t hi1 = vshrn_n_u64(p1, 32);
      const uint32x2_t lo1 = vmovn_u64(p1);
      c0 = veor_u32(veor_u32(hi1, c1), vdup_n_u32(k.k0));
      c1 = lo1;
      c2 = veor_u32(veor_u32(hi0, c3), vdup_n_u32(k.k1));
      c3 = lo0;
      k.k0 += kPhiloxW0;
      k.k1 += kPhiloxW1;
    }
    uint32x2x4_t blk = {{c0, c1, c2, c3}};
    vst4_u32(out + 4 * i, blk);
  }
  if (i < blocks) scalar_table().philox_fill(key, stream, first_block + i, out + 4 * i, blocks - i);
}

inline int32x4_t four_pulses(const std::uint32_t* pairs, int32x4_t base, uint32x4_t frac,
                             uint32x4_t down, uint32x4_t up) {
  const uint32x4x2_t ab = vld2q_u32(pairs);
  const uint32x4_t bern = vcltq_u32(ab.val[0], frac);
  const uint32x4_t minus = vcltq_u32(ab.val[1], down);
  const uint32x4_t plus = vcltq_u32(vsubq_u32(ab.val[1], down), up);
  int32x4_t c = vsubq_s32(base, vreinterpretq_s32_u32(bern));
  c = vaddq_s32(c, vreinterpretq_s32_u32(minus));
  c = vsubq_s32(c, vreinterpretq_s32_u32(plus));
  return vmaxq_s32(c, vdupq_n_s32(0));
}

void pulse_counts_neon(const std::uint32_t* pairs, std::size_t n, PulseThresholds th,
                       std::int32_t* out) {
  const int32x4_t base = vdupq_n_s32(th.base);
  const uint32x4_t frac = vdupq_n_u32(th.frac);
  const uint32x4_t down = vdupq_n_u32(th.down);
  const uint32x4_t up = vdupq_n_u32(th.up);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) vst1q_s32(out + i, four_pulses(pairs + 2 * i, base, frac, down, up));
  if (i < n) scalar_table().pulse_counts(pairs + 2 * i, n - i, th, out + i);
}

std::int64_t pulse_count_sum_neon(const std::uint32_t* pairs, std::size_t n,
                                  PulseThresholds th) {
  const int32x4_t base = vdupq_n_s32(th.base);
  const uint32x4_t frac = vdupq_n_u32(th.frac);
  const uint32x4_t down = vdupq_n_u32(th.down);
  const uint32x4_t up = vdupq_n_u32(th.up);
  int64x2_t acc = vdupq_n_s64(0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = vpadalq_s32(acc, four_pulses(pairs + 2 * i, base, frac, down, up));
  std::int64_t total = vgetq_lane_s64(acc, 0) + vgetq_lane_s64(acc, 1);
  if (i < n) total += scalar_table().pulse_count_sum(pairs + 2 * i, n - i, th);
  return total;
}

void translate_neon(double* x, double* y, std::size_t n, double dx, double dy) {
  const float64x2_t vdx = vdupq_n_f64(dx);
  const float64x2_t vdy = vdupq_n_f64(dy);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(x + i, vaddq_f64(vld1q_f64(x + i), vdx));
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vdy));
  }
  if (i < n) scalar_table().translate(x + i, y + i, n - i, dx, dy);
}

inline uint64x2_t inside2(const double* x, const double* y, const Rect& r) {
  const float64x2_t vx = vld1q_f64(x);
  const float64x2_t vy = vld1q_f64(y);
  uint64x2_t in = vandq_u64(vcgeq_f64(vx, vdupq_n_f64(r.x0)), vcleq_f64(vx, vdupq_n_f64(r.x1)));
  in = vandq_u64(in, vcgeq_f64(vy, vdupq_n_f64(r.y0)));
  return vandq_u64(in, vcleq_f64(vy, vdupq_n_f64(r.y1)));
}

std::size_t cull_outside_neon(const double* x, const double* y, std::uint8_t* alive,
                              std::size_t n, Rect r) {
  std::size_t culled = 0;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint64x2_t in = inside2(x + i, y + i, r);
    for (int k = 0; k < 2; ++k) {
      const bool is_in = (k == 0 ? vgetq_lane_u64(in, 0) : vgetq_lane_u64(in, 1)) != 0;
      if (alive[i + k] && !is_in) {
        alive[i + k] = 0;
        ++culled;
      }
    }
  }
  if (i < n) culled += scalar_table().cull_outside(x + i, y + i, alive + i, n - i, r);
  return culled;
}

std::size_t count_in_rect_neon(const double* x, const double* y, const std::uint8_t* alive,
                               std::size_t n, Rect r) {
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint64x2_t in = inside2(x + i, y + i, r);
    count += (alive[i] && vgetq_lane_u64(in, 0) != 0);
    count += (alive[i + 1] && vgetq_lane_u64(in, 1) != 0);
  }
  if (i < n) count += scalar_table().count_in_rect(x + i, y + i, alive + i, n - i, r);
  return count;
}

void accumulate_rows_neon(const double* w, const double* x, std::size_t rows, std::size_t cols,
                          double* out) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = w + i * cols;
    const float64x2_t xi = vdupq_n_f64(x[i]);
    std::size_t j = 0;
    for (; j + 2 <= cols; j += 2) {
      // vmulq + vaddq, not vfmaq: must round like the scalar loop.
      const float64x2_t prod = vmulq_f64(vld1q_f64(row + j), xi);
      vst1q_f64(out + j, vaddq_f64(vld1q_f64(out + j), prod));
    }
    for (; j < cols; ++j) out[j] = out[j] + row[j] * x[i];
  }
}

}  // namespace

const KernelTable& neon_table() noexcept {
  static const KernelTable t{Backend::neon,       philox_fill_neon,   pulse_counts_neon,
                             pulse_count_sum_neon, translate_neon,     cull_outside_neon,
                             count_in_rect_neon,   accumulate_rows_neon};
  return t;
}

}  // namespace skysum::kernels::detail
