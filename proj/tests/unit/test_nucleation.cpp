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
#include <map>
#include <vector>

#include "skysum/error.hpp"
#include "skysum/nucleation.hpp"
#include "support/oracles.hpp"

using namespace skysum;
using namespace skysum::nucleation;
using doctest::Approx;

namespace {

std::vector<std::int32_t> draw(double w, const StochasticModel& m, std::size_t n, std::uint64_t id) {
  Stream rng(2024, id);
  std::vector<std::int32_t> out(n);
  sample_pulse_counts(w, m, rng, out);
  return out;
}

}  // namespace

TEST_CASE("deterministic limit") {
  for (std::int32_t c : draw(1.0, {0.0}, 1000, 1)) REQUIRE(c == 1);
  for (std::int32_t c : draw(0.0, {0.7}, 1000, 2)) REQUIRE(c == 0);
  for (std::int32_t c : draw(3.0, {0.0}, 1000, 3)) REQUIRE(c == 3);
}

TEST_CASE("single and batched sampling consume the same words") {
  Stream a(3, 3), b(3, 3);
  std::vector<std::int32_t> batch(257);
  sample_pulse_counts(1.37, {0.4}, a, batch);
  for (auto c : batch) CHECK(sample_pulse_count(1.37, {0.4}, b) == c);
  Stream t(3, 3);
  std::int64_t sum = 0;
  for (auto c : batch) sum += c;
  CHECK(sample_total(1.37, {0.4}, t, 257) == sum);
}

TEST_CASE("w = 1, p = 0.4 gives {0: 0.2, 1: 0.6, 2: 0.2}") {
  constexpr std::size_t n = 400000;
  std::map<int, double> freq;
  for (auto c : draw(1.0, {0.4}, n, 4)) freq[c] += 1.0 / n;
  CHECK(freq.size() == 3);
  const double se = std::sqrt(0.2 * 0.8 / n);
  CHECK(std::abs(freq[0] - 0.2) < 4 * se);
  CHECK(std::abs(freq[1] - 0.6) < 4 * std::sqrt(0.24 / n));
  CHECK(std::abs(freq[2] - 0.2) < 4 * se);
}

TEST_CASE("w = 2.5, p = 0: half twos, half threes, mean 2.5") {
  constexpr std::size_t n = 1000000;
  const auto c = draw(2.5, {0.0}, n, 5);
  double mean = 0.0;
  std::map<int, std::size_t> hist;
  for (auto v : c) {
    mean += v;
    ++hist[v];
  }
  mean /= n;
  CHECK(hist.size() == 2);
  CHECK(hist.count(2) == 1);
  CHECK(hist.count(3) == 1);
  CHECK(std::abs(mean - 2.5) < 3.0 * 0.5 / std::sqrt(double(n)));
}

TEST_CASE("empirical distribution matches the enumerated oracle") {
  for (double w : {0.3, 1.0, 1.7, 3.42}) {
    for (double p : {0.1, 0.5, 1.0}) {
      CAPTURE(w);
      CAPTURE(p);
      constexpr std::size_t n = 200000;
      const auto pmf = oracle::pulse_pmf(w, p);
      std::vector<double> freq(pmf.size(), 0.0);
      for (auto c : draw(w, {p}, n, 6)) {
        REQUIRE(static_cast<std::size_t>(c) < freq.size());
        freq[static_cast<std::size_t>(c)] += 1.0 / n;
      }
      for (std::size_t k = 0; k < pmf.size(); ++k) {
        CHECK(std::abs(freq[k] - pmf[k]) < 5.0 * std::sqrt(pmf[k] * (1 - pmf[k]) / n) + 1e-9);
      }
    }
  }
}

TEST_CASE("uneven split honours up_fraction") {
  StochasticModel m{0.4, false, 0.75};
  CHECK(m.p_up() == Approx(0.3));
  CHECK(m.p_down() == Approx(0.1));
  constexpr std::size_t n = 200000;
  double twos = 0, zeros = 0;
  for (auto c : draw(1.0, m, n, 7)) {
    twos += c == 2;
    zeros += c == 0;
  }
  CHECK(twos / n == Approx(0.3).epsilon(0.03));
  CHECK(zeros / n == Approx(0.1).epsilon(0.05));
}

TEST_CASE("invalid inputs") {
  Stream rng(1, 1);
  CHECK_THROWS_AS(sample_pulse_count(-0.1, {0.1}, rng), PreconditionError);
  CHECK_THROWS_AS(sample_pulse_count(1.0, {1.5}, rng), ValidationError);
  CHECK_THROWS_AS(analytic_sigma({0.4}, 0), PreconditionError);
}

TEST_CASE("analytic_sigma") {
  CHECK(analytic_sigma({0.0}, 17) == 0.0);
  CHECK(analytic_sigma({0.4}, 100) == Approx(0.0632).epsilon(1e-3));
  CHECK(analytic_sigma({0.4}, 10) == Approx(0.2));
}

TEST_CASE("monte_carlo_sigma") {
  CHECK(monte_carlo_sigma({0.0}, 50, 10000, 1) == 0.0);
  const double s = monte_carlo_sigma({0.4}, 100, 100000, 2);
  CHECK(std::abs(s - 0.0632456) < 0.001);
  CHECK(monte_carlo_sigma({1.0}, 4, 100000, 3) == Approx(0.5).epsilon(0.02));
  CHECK(monte_carlo_sigma({0.4}, 10, 5000, 9) == monte_carlo_sigma({0.4}, 10, 5000, 9));
}

TEST_CASE("estimate_pbar_from_trace") {
  auto events = [](std::vector<int> counts) {
    std::vector<NucleationEvent> e;
    for (std::size_t i = 0; i < counts.size(); ++i) e.push_back({std::int64_t(i), counts[i]});
    return e;
  };
  CHECK(estimate_pbar_from_trace(events({1, 1, 1, 1})) == 0.0);
  CHECK(estimate_pbar_from_trace(events({0, 1, 2, 1, 1, 1, 2, 0, 1, 1})) == Approx(0.4));
  CHECK_THROWS_AS(estimate_pbar_from_trace({}), InsufficientData);

  const auto c = draw(1.0, {0.4}, 10000, 8);
  std::vector<NucleationEvent> e;
  for (std::size_t i = 0; i < c.size(); ++i) e.push_back({std::int64_t(i), c[i]});
  CHECK(std::abs(estimate_pbar_from_trace(e) - 0.4) < 0.01);
}

TEST_CASE("fit_weight") {
  const std::vector<CumulativePoint> line{{0, 0}, {10, 10}, {20, 20}};
  const auto f = fit_weight(line);
  CHECK(f.slope == Approx(1.0));
  CHECK(f.intercept == Approx(0.0));
  CHECK(f.r_squared == Approx(1.0));
  REQUIRE(f.slope_std.has_value());
  CHECK(*f.slope_std == Approx(0.0));

  const std::vector<CumulativePoint> two{{0, 0}, {20, 68.4}};
  const auto g = fit_weight(two);
  CHECK(g.slope == Approx(3.42));
  CHECK_FALSE(g.slope_std.has_value());

  const std::vector<CumulativePoint> flat{{5, 0}, {5, 1}, {5, 2}};
  CHECK_THROWS_AS(fit_weight(flat), SingularFit);
  CHECK_THROWS_AS(fit_weight(std::vector<CumulativePoint>{{1, 1}}), InsufficientData);
}

TEST_CASE("fit_weight recovers noise-free weights to 1e-9") {
  for (double w : {0.25, 1.0, 1.14, 2.85, 3.42}) {
    std::vector<CumulativePoint> pts;
    for (int n = 0; n <= 20; ++n) pts.push_back({double(n), w * n});
    CHECK(std::abs(fit_weight(pts).slope - w) < 1e-9);
  }
}

TEST_CASE("stochastic fit at 1.14 sk/pulse, 20 pulses") {
  int inside = 0;
  constexpr int repeats = 400;
  for (int r = 0; r < repeats; ++r) {
    const auto c = draw(1.14, {0.4}, 20, 100 + r);
    inside += std::abs(fit_weight(cumulative(c)).slope - 1.14) <= 0.15;
  }
  // ±0.15 is about one standard deviation of the OLS slope.
  CHECK(inside > repeats * 0.55);
}

TEST_CASE("cumulative starts at the origin") {
  const std::vector<std::int32_t> c{1, 0, 2};
  const auto pts = cumulative(c);
  REQUIRE(pts.size() == 4);
  CHECK(pts[0].n_sk == 0.0);
  CHECK(pts[3].n_pulses == 3.0);
  CHECK(pts[3].n_sk == 3.0);
}
