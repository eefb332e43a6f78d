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

#include <cmath>
#include <set>

#include "skysum/rng.hpp"

using namespace skysum;

TEST_CASE("streams are reproducible and distinct") {
  Stream a(1, stream_id({3})), b(1, stream_id({3})), c(1, stream_id({4})), d(2, stream_id({3}));
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 16; ++i) {
    const auto x = a.next_u32();
    CHECK(x == b.next_u32());
    differs_c |= x != c.next_u32();
    differs_d |= x != d.next_u32();
  }
  CHECK(differs_c);
  CHECK(differs_d);
}

TEST_CASE("stream_id mixes every part and their order") {
  std::set<std::uint64_t> ids;
  for (std::uint64_t i = 0; i < 20; ++i) {
    for (std::uint64_t j = 0; j < 20; ++j) ids.insert(stream_id({i, j}));
  }
  CHECK(ids.size() == 400);
  CHECK(stream_id({1, 2}) != stream_id({2, 1}));
  CHECK(stream_id({0}) != stream_id({0, 0}));
}

TEST_CASE("position counts consumed words") {
  Stream s(5, 5);
  CHECK(s.position() == 0);
  s.next_u32();
  CHECK(s.position() == 1);
  s.next_u64();
  CHECK(s.position() == 3);
  s.uniform();
  CHECK(s.position() == 5);
}

TEST_CASE("uniform lies in [0, 1) and uniform_open0 in (0, 1]") {
  Stream s(11, 0);
  double sum = 0.0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double v = s.uniform_open0();
    REQUIRE(v > 0.0);
    REQUIRE(v <= 1.0);
    sum += u;
  }
  // Mean 1/2, standard error sqrt(1/12/n).
  CHECK(std::abs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("normal deviates have unit variance") {
  Stream s(12, 0);
  constexpr int n = 200000;
  double m = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    REQUIRE(std::isfinite(z));
    m += z;
    m2 += z * z;
  }
  m /= n;
  const double var = m2 / n - m * m;
  CHECK(std::abs(m) < 4.0 / std::sqrt(n));
  CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}
