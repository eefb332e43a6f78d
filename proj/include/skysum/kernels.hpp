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

// Data-parallel inner loops of the simulator.
//
// Every kernel has a scalar reference in kernels/scalar.cpp and optional
// AVX2 / NEON variants. The variant is picked once at startup from the CPU
// features (override with SKYSUM_KERNELS=scalar|avx2|neon). All variants are
// required to be bit-identical to the scalar reference: there are no
// reassociated reductions and no fused multiply-adds.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "skysum/rng.hpp"

namespace skysum::kernels {

enum class Backend { scalar, avx2, neon };

/// Closed axis-aligned rectangle, µm.
struct Rect {
  double x0 = 0.0;
  double x1 = 0.0;
  double y0 = 0.0;
  double y1 = 0.0;
};

/// Integer form of the per-pulse nucleation rule. For a pulse drawing the
/// word pair (a, b):
///
///   count = max(0, base + [a < frac] - [b < down] + [(b - down) mod 2^32 < up])
///
/// `down + up` must not exceed 2^32, which keeps the two deviation events
/// disjoint.
struct PulseThresholds {
  std::int32_t base = 0;
  std::uint32_t frac = 0;
  std::uint32_t down = 0;
  std::uint32_t up = 0;
};

struct KernelTable {
  Backend backend;
  /// Writes `blocks` consecutive Philox blocks (4 words each) of stream
  /// `stream`, starting at block index `first_block`.
  void (*philox_fill)(PhiloxKey key, std::uint64_t stream, std::uint64_t first_block,
                      std::uint32_t* out, std::size_t blocks);
  /// `pairs` holds 2*n words, (a, b) per pulse.
  void (*pulse_counts)(const std::uint32_t* pairs, std::size_t n, PulseThresholds th,
                       std::int32_t* out);
  std::int64_t (*pulse_count_sum)(const std::uint32_t* pairs, std::size_t n,
                                  PulseThresholds th);
  void (*translate)(double* x, double* y, std::size_t n, double dx, double dy);
  /// Clears `alive` for live entries outside `r`; returns how many were cleared.
  std::size_t (*cull_outside)(const double* x, const double* y, std::uint8_t* alive,
                              std::size_t n, Rect r);
  std::size_t (*count_in_rect)(const double* x, const double* y, const std::uint8_t* alive,
                               std::size_t n, Rect r);
  /// out[j] += sum_i w[i*cols + j] * x[i], accumulated row by row in order.
  void (*accumulate_rows)(const double* w, const double* x, std::size_t rows,
                          std::size_t cols, double* out);
};

std::string_view backend_name(Backend b) noexcept;
std::optional<Backend> parse_backend(std::string_view name) noexcept;

/// Backends compiled in and supported by this CPU.
std::vector<Backend> available_backends();
bool is_available(Backend b);

/// Table for a specific backend; throws PreconditionError if unavailable.
const KernelTable& table(Backend b);

Backend active_backend() noexcept;
/// Switches the process-wide backend (tests and the CLI use this).
void set_active_backend(Backend b);
const KernelTable& active() noexcept;

// Span front-ends over the active backend.

void philox_fill(PhiloxKey key, std::uint64_t stream, std::uint64_t first_block,
                 std::span<std::uint32_t> out);
void pulse_counts(std::span<const std::uint32_t> pairs, PulseThresholds th,
                  std::span<std::int32_t> out);
std::int64_t pulse_count_sum(std::span<const std::uint32_t> pairs, PulseThresholds th);
void translate(std::span<double> x, std::span<double> y, double dx, double dy);
std::size_t cull_outside(std::span<const double> x, std::span<const double> y,
                         std::span<std::uint8_t> alive, Rect r);
std::size_t count_in_rect(std::span<const double> x, std::span<const double> y,
                          std::span<const std::uint8_t> alive, Rect r);
void accumulate_rows(std::span<const double> w, std::span<const double> x, std::size_t cols,
                     std::span<double> out);

}  // namespace skysum::kernels
