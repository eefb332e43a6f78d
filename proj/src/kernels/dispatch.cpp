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

#include <atomic>
#include <cstdlib>

#include "kernels_internal.hpp"
#include "skysum/error.hpp"

namespace skysum::kernels {
namespace {

bool cpu_supports(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(SKYSUM_HAVE_AVX2_KERNELS)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Backend::neon:
#if defined(SKYSUM_HAVE_NEON_KERNELS)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend pick_default() {
  if (const char* env = std::getenv("SKYSUM_KERNELS")) {
    if (auto b = parse_backend(env); b && cpu_supports(*b)) return *b;
  }
  if (cpu_supports(Backend::avx2)) return Backend::avx2;
  if (cpu_supports(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{&table(pick_default())};
  return slot;
}

}  // namespace

std::string_view backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

std::optional<Backend> parse_backend(std::string_view name) noexcept {
  for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
    if (backend_name(b) == name) return b;
  }
  return std::nullopt;
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
    if (cpu_supports(b)) out.push_back(b);
  }
  return out;
}

bool is_available(Backend b) { return cpu_supports(b); }

const KernelTable& table(Backend b) {
  if (!cpu_supports(b)) {
    throw PreconditionError("kernel backend not available: " + std::string(backend_name(b)));
  }
  switch (b) {
#if defined(SKYSUM_HAVE_AVX2_KERNELS)
    case Backend::avx2:
      return detail::avx2_table();
#endif
#if defined(SKYSUM_HAVE_NEON_KERNELS)
    case Backend::neon:
      return detail::neon_table();
#endif
    default:
      return detail::scalar_table();
  }
}

Backend active_backend() noexcept { return active_slot().load()->backend; }

void set_active_backend(Backend b) { active_slot().store(&table(b)); }

const KernelTable& active() noexcept { return *active_slot().load(); }

void philox_fill(PhiloxKey key, std::uint64_t stream, std::uint64_t first_block,
                 std::span<std::uint32_t> out) {
  skysum::detail::require(out.size() % 4 == 0, "philox_fill: output size must be a multiple of 4");
  active().philox_fill(key, stream, first_block, out.data(), out.size() / 4);
}

void pulse_counts(std::span<const std::uint32_t> pairs, PulseThresholds th,
                  std::span<std::int32_t> out) {
  skysum::detail::require(pairs.size() == 2 * out.size(), "pulse_counts: need two words per pulse");
  active().pulse_counts(pairs.data(), out.size(), th, out.data());
}

std::int64_t pulse_count_sum(std::span<const std::uint32_t> pairs, PulseThresholds th) {
  skysum::detail::require(pairs.size() % 2 == 0, "pulse_count_sum: need two words per pulse");
  return active().pulse_count_sum(pairs.data(), pairs.size() / 2, th);
}

void translate(std::span<double> x, std::span<double> y, double dx, double dy) {
  skysum::detail::require(x.size() == y.size(), "translate: x/y size mismatch");
  active().translate(x.data(), y.data(), x.size(), dx, dy);
}

std::size_t cull_outside(std::span<const double> x, std::span<const double> y,
                         std::span<std::uint8_t> alive, Rect r) {
  skysum::detail::require(x.size() == y.size() && x.size() == alive.size(),
                  "cull_outside: size mismatch");
  return active().cull_outside(x.data(), y.data(), alive.data(), x.size(), r);
}

std::size_t count_in_rect(std::span<const double> x, std::span<const double> y,
                          std::span<const std::uint8_t> alive, Rect r) {
  skysum::detail::require(x.size() == y.size() && x.size() == alive.size(),
                  "count_in_rect: size mismatch");
  return active().count_in_rect(x.data(), y.data(), alive.data(), x.size(), r);
}

void accumulate_rows(std::span<const double> w, std::span<const double> x, std::size_t cols,
                     std::span<double> out) {
  skysum::detail::require(out.size() == cols && w.size() == x.size() * cols,
                  "accumulate_rows: shape mismatch");
  active().accumulate_rows(w.data(), x.data(), x.size(), cols, out.data());
}

}  // namespace skysum::kernels
