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

#include <algorithm>

#include "kernels_internal.hpp"

namespace skysum::kernels::detail {
namespace {

void philox_fill_scalar(PhiloxKey key, std::uint64_t stream, std::uint64_t first_block,
                        std::uint32_t* out, std::size_t blocks) {
  const auto s_lo = static_cast<std::uint32_t>(stream);
  const auto s_hi = static_cast<std::uint32_t>(stream >> 32);
  for (std::size_t i = 0; i < blocks; ++i) {
    const std::uint64_t b = first_block + i;
    const auto r = philox4x32_10(
        {static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32), s_lo, s_hi}, key);
    std::copy(r.begin(), r.end(), out + 4 * i);
  }
}

inline std::int32_t one_pulse(std::uint32_t a, std::uint32_t b, PulseThresholds th) {
  std::int32_t c = th.base;
  c += a < th.frac;
  c -= b < th.down;
  c += static_cast<std::uint32_t>(b - th.down) < th.up;
  return c < 0 ? 0 : c;
}

void pulse_counts_scalar(const std::uint32_t* pairs, std::size_t n, PulseThresholds th,
                         std::int32_t* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = one_pulse(pairs[2 * i], pairs[2 * i + 1], th);
}

std::int64_t pulse_count_sum_scalar(const std::uint32_t* pairs, std::size_t n,
                                    PulseThresholds th) {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) total += one_pulse(pairs[2 * i], pairs[2 * i + 1], th);
  return total;
}

void translate_scalar(double* x, double* y, std::size_t n, double dx, double dy) {
  for (std::size_t i = 0; i < n; ++i) {
    x[i] += dx;
    y[i] += dy;
  }
}

inline bool inside(double x, double y, const Rect& r) {
  return x >= r.x0 && x <= r.x1 && y >= r.y0 && y <= r.y1;
}

std::size_t cull_outside_scalar(const double* x, const double* y, std::uint8_t* alive,
                                std::size_t n, Rect r) {
  std::size_t culled = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (alive[i] && !inside(x[i], y[i], r)) {
      alive[i] = 0;
      ++culled;
    }
  }
  return culled;
}

std::size_t count_in_rect_scalar(const double* x, const double* y, const std::uint8_t* alive,
                                 std::size_t n, Rect r) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += (alive[i] && inside(x[i], y[i], r));
  return count;
}

void accumulate_rows_scalar(const double* w, const double* x, std::size_t rows,
                            std::size_t cols, double* out) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double xi = x[i];
    const double* row = w + i * cols;
    for (std::size_t j = 0; j < cols; ++j) out[j] = out[j] + row[j] * xi;
  }
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable t{Backend::scalar,       philox_fill_scalar,   pulse_counts_scalar,
                             pulse_count_sum_scalar, translate_scalar,     cull_outside_scalar,
                             count_in_rect_scalar,   accumulate_rows_scalar};
  return t;
}

}  // namespace skysum::kernels::detail
