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

#include <doctest.h>

#include <array>
#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "skysum/kernels.hpp"
#include "skysum/rng.hpp"

using namespace skysum;
using kernels::Backend;

namespace {

// Random123 known-answer vectors for philox4x32-10.
struct Kat {
  std::array<std::uint32_t, 4> ctr;
  PhiloxKey key;
  std::array<std::uint32_t, 4> out;
};

constexpr Kat kKats[] = {
    {{0, 0, 0, 0}, {0, 0}, {0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}},
    {{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
     {0xffffffff, 0xffffffff},
     {0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}},
    {{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
     {0xa4093822, 0x299f31d0},
     {0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}},
};

static_assert(philox4x32_10(kKats[0].ctr, kKats[0].key) == kKats[0].out);

std::vector<std::uint32_t> random_words(std::size_t n, std::uint64_t id) {
  Stream s(99, id);
  std::vector<std::uint32_t> w(n);
  for (auto& x : w) x = s.next_u32();
  return w;
}

std::vector<double> random_doubles(std::size_t n, std::uint64_t id, double lo, double hi) {
  Stream s(7, id);
  std::vector<double> v(n);
  for (auto& x : v) x = lo + (hi - lo) * s.uniform();
  return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

const kernels::KernelTable& ref() { return kernels::table(Backend::scalar); }

}  // namespace

TEST_CASE("philox matches the published known-answer vectors") {
  for (const auto& k : kKats) CHECK(philox4x32_10(k.ctr, k.key) == k.out);
}

TEST_CASE("every backend reproduces the known-answer vectors through philox_fill") {
  // philox_fill derives the counter from (block, stream); pick them to hit the KAT counters.
  for (Backend b : kernels::available_backends()) {
    CAPTURE(kernels::backend_name(b));
    for (const auto& k : kKats) {
      const std::uint64_t block = k.ctr[0] | (std::uint64_t{k.ctr[1]} << 32);
      const std::uint64_t stream = k.ctr[2] | (std::uint64_t{k.ctr[3]} << 32);
      std::array<std::uint32_t, 32> out{};
      // Fill eight blocks ending at the KAT block so SIMD lanes are exercised.
      kernels::table(b).philox_fill(k.key, stream, block - 7, out.data(), 8);
      CHECK(out[28] == k.out[0]);
      CHECK(out[29] == k.out[1]);
      CHECK(out[30] == k.out[2]);
      CHECK(out[31] == k.out[3]);
    }
  }
}

TEST_CASE("philox_fill is bit-identical across backends, including tails and counter carries") {
  const PhiloxKey key{0x12345678u, 0x9abcdef0u};
  for (Backend b : kernels::available_backends()) {
    CAPTURE(kernels::backend_name(b));
    for (std::uint64_t first : {std::uint64_t{0}, std::uint64_t{0xFFFFFFFDull}, ~std::uint64_t{0} - 20}) {
      for (std::size_t blocks = 0; blocks <= 37; ++blocks) {
        std::vector<std::uint32_t> a(4 * blocks), c(4 * blocks);
        ref().philox_fill(key, 0xDEADBEEFCAFEull, first, a.data(), blocks);
        kernels::table(b).philox_fill(key, 0xDEADBEEFCAFEull, first, c.data(), blocks);
        CHECK(a == c);
      }
    }
  }
}

TEST_CASE("pulse kernels agree with the scalar reference") {
  const auto words = random_words(2 * 203, 1);
  std::vector<kernels::PulseThresholds> cases = {
      {},                                           // w == 0
      {1, 0, 0x33333333u, 0x33333333u},             // w = 1, p = 0.4
      {2, 0x80000000u, 0, 0},                       // w = 2.5, p = 0
      {0, 0xFFFFFFFFu, 0x80000000u, 0x80000000u},   // p = 1
      {3, 0x12345678u, 0x7FFFFFFFu, 0x10u},         // uneven split
      {1000000, 1u, 0xFFFFFFFFu, 0u},               // large base
  };
  for (Backend b : kernels::available_backends()) {
    CAPTURE(kernels::backend_name(b));
    for (const auto& th : cases) {
      for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 9u, 16u, 17u, 203u}) {
        std::vector<std::int32_t> a(n), c(n);
        ref().pulse_counts(words.data(), n, th, a.data());
        kernels::table(b).pulse_counts(words.data(), n, th, c.data());
        CHECK(a == c);
        CHECK(ref().pulse_count_sum(words.data(), n, th) ==
              kernels::table(b).pulse_count_sum(words.data(), n, th));
      }
    }
  }
}

TEST_CASE("scalar pulse rule: deviations and clamping") {
  const kernels::PulseThresholds th{0, 0, 10, 10};
  const std::uint32_t pairs[] = {0, 5, 0, 12, 0, 25};  // down, up, none
  std::int32_t out[3];
  ref().pulse_counts(pairs, 3, th, out);
  CHECK(out[0] == 0);  // 0 - 1 clamps to 0
  CHECK(out[1] == 1);
  CHECK(out[2] == 0);
}

TEST_CASE("geometry kernels are bit-identical across backends") {
  const kernels::Rect r{5.0, 11.0, 0.0, 6.0};
  for (Backend b : kernels::available_backends()) {
    CAPTURE(kernels::backend_name(b));
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 8u, 13u, 64u, 67u}) {
      auto x = random_doubles(n, 10 + n, 0.0, 16.0);
      auto y = random_doubles(n, 20 + n, -1.0, 7.0);
      if (n > 2) {
        x[0] = 5.0;  // boundary points count as inside
        y[1] = 6.0;
        x[2] = std::numeric_limits<double>::quiet_NaN();
      }
      std::vector<std::uint8_t> alive(n);
      for (std::size_t i = 0; i < n; ++i) alive[i] = (i % 5) != 3;

      auto xa = x, ya = y, xb = x, yb = y;
      ref().translate(xa.data(), ya.data(), n, 0.7171, 0.19215);
      kernels::table(b).translate(xb.data(), yb.data(), n, 0.7171, 0.19215);
      CHECK(same_bits(xa, xb));
      CHECK(same_bits(ya, yb));

      CHECK(ref().count_in_rect(x.data(), y.data(), alive.data(), n, r) ==
            kernels::table(b).count_in_rect(x.data(), y.data(), alive.data(), n, r));

      auto la = alive, lb = alive;
      CHECK(ref().cull_outside(x.data(), y.data(), la.data(), n, r) ==
            kernels::table(b).cull_outside(x.data(), y.data(), lb.data(), n, r));
      CHECK(la == lb);
    }
  }
}

TEST_CASE("accumulate_rows is bit-identical across backends") {
  for (Backend b : kernels::available_backends()) {
    CAPTURE(kernels::backend_name(b));
    for (std::size_t rows : {1u, 3u, 10u}) {
      for (std::size_t cols : {1u, 2u, 3u, 4u, 5u, 9u, 31u}) {
        const auto w = random_doubles(rows * cols, rows * 100 + cols, -2.0, 3.0);
        const auto x = random_doubles(rows, rows, 0.0, 50.0);
        std::vector<double> a(cols, 0.25), c(cols, 0.25);
        ref().accumulate_rows(w.data(), x.data(), rows, cols, a.data());
        kernels::table(b).accumulate_rows(w.data(), x.data(), rows, cols, c.data());
        CHECK(same_bits(a, c));
      }
    }
  }
}

TEST_CASE("span front-ends validate sizes") {
  std::vector<double> x(3), y(2);
  CHECK_THROWS(kernels::translate(x, y, 1.0, 1.0));
  std::vector<std::uint32_t> words(5);
  std::vector<std::int32_t> out(2);
  CHECK_THROWS(kernels::pulse_counts(words, {}, out));
  std::vector<std::uint32_t> odd(6);
  CHECK_THROWS(kernels::philox_fill({}, 0, 0, odd));
}

TEST_CASE("backend selection") {
  CHECK(kernels::parse_backend("scalar") == Backend::scalar);
  CHECK(kernels::parse_backend("avx2") == Backend::avx2);
  CHECK_FALSE(kernels::parse_backend("sse9").has_value());
  CHECK(kernels::is_available(Backend::scalar));
  const Backend before = kernels::active_backend();
  kernels::set_active_backend(Backend::scalar);
  CHECK(kernels::active_backend() == Backend::scalar);
  kernels::set_active_backend(before);
  for (Backend b : {Backend::avx2, Backend::neon}) {
    if (!kernels::is_available(b)) CHECK_THROWS(kernels::set_active_backend(b));
  }
}

TEST_CASE("Stream::fill_u32 equals repeated next_u32 on every backend") {
  const Backend before = kernels::active_backend();
  for (Backend b : kernels::available_backends()) {
    CAPTURE(kernels::backend_name(b));
    kernels::set_active_backend(b);
    for (std::size_t skip : {0u, 1u, 3u, 4u, 5u}) {
      for (std::size_t n : {0u, 1u, 7u, 16u, 33u, 1001u}) {
        Stream s1(42, 17), s2(42, 17);
        for (std::size_t i = 0; i < skip; ++i) {
          s1.next_u32();
          s2.next_u32();
        }
        std::vector<std::uint32_t> a(n), c(n);
        for (auto& v : a) v = s1.next_u32();
        s2.fill_u32(c);
        CHECK(a == c);
        CHECK(s1.next_u32() == s2.next_u32());
        CHECK(s1.position() == s2.position());
      }
    }
  }
  kernels::set_active_backend(before);
}
