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
#include <sstream>

#include "skysum/analysis.hpp"
#include "skysum/error.hpp"

using namespace skysum;
using namespace skysum::analysis;
using doctest::Approx;

TEST_CASE("energy presets") {
  CHECK(energy_preset("thermal_measured").e_per_skyrmion == 20e-12);
  CHECK(energy_preset("thermal_optimized").e_per_skyrmion == 10e-12);
  CHECK(energy_preset("vcma").e_per_skyrmion == 100e-15);
  CHECK(energy_preset("barrier_limit").e_per_skyrmion == 2e-18);
  CHECK(energy_presets().size() == 4);
  CHECK_THROWS_AS(energy_preset("cold_fusion"), ValidationError);
  EnergyModel bad{"x", 0.0};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("sum_precision") {
  CHECK(sum_precision(10, 10, 0.0).value == 1.0);
  CHECK(sum_precision(10, 10, 0.4).value == Approx(1.0 - std::sqrt(0.004)).epsilon(1e-12));
  CHECK(sum_precision(10, 10, 0.4).value == Approx(0.9368).epsilon(1e-4));
  const auto edge = sum_precision(1, 1, 1.0);
  CHECK(edge.value == 0.0);
  CHECK_FALSE(edge.clamped);
  CHECK(sum_precision(1, 1, 1.0).value >= 0.0);
  CHECK_THROWS_AS(sum_precision(0, 1, 0.4), PreconditionError);
  CHECK_THROWS_AS(sum_precision(1, 0, 0.4), PreconditionError);
  CHECK_THROWS_AS(sum_precision(1, 1, 1.2), PreconditionError);
  for (int m = 1; m <= 12; ++m) {
    for (int n = 1; n <= 40; n += 3) {
      CHECK(sum_precision(m, n, 0.7).value == Approx(sum_precision(1, m * n, 0.7).value).epsilon(1e-15));
    }
  }
}

TEST_CASE("sum_energy") {
  const auto vcma = energy_preset("vcma");
  CHECK(sum_energy(10, 10, vcma) == Approx(10e-12).epsilon(1e-12));
  const auto barrier = energy_preset("barrier_limit");
  CHECK(sum_energy(10, 1, barrier) == Approx(20e-18).epsilon(1e-12));
  CHECK(sum_energy(10, 1, barrier) / 10.0 == Approx(2e-18).epsilon(1e-12));
  CHECK_THROWS_AS(sum_energy(10, 0, barrier), PreconditionError);
  CHECK(sum_energy(6, 7, vcma) == Approx(sum_energy(3, 14, vcma)).epsilon(1e-15));
}

TEST_CASE("pareto_curve") {
  const auto model = energy_preset("thermal_measured");
  const auto range = pulse_range(1, 100);
  CHECK(range.size() == 100);
  const auto pts = pareto_curve(10, 0.4, model, range);
  REQUIRE(pts.size() == 100);
  CHECK(pts.front().precision == Approx(0.8).epsilon(1e-12));
  CHECK(pts.front().energy == Approx(0.2e-9).epsilon(1e-12));
  CHECK(pts.back().precision == Approx(0.98).epsilon(1e-12));
  CHECK(pts.back().energy == Approx(20e-9).epsilon(1e-12));
  for (std::size_t k = 1; k < pts.size(); ++k) {
    CHECK(pts[k].precision > pts[k - 1].precision);
    CHECK(pts[k].energy > pts[k - 1].energy);
  }
  const auto flat = pareto_curve(10, 0.0, model, range);
  for (std::size_t k = 0; k < flat.size(); ++k) {
    CHECK(flat[k].precision == 1.0);
    CHECK(flat[k].energy == Approx(10.0 * (k + 1) * 20e-12));
  }
  const auto vcma = pareto_curve(10, 0.4, energy_preset("vcma"), range);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    CHECK(pts[k].energy / vcma[k].energy == Approx(200.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(pareto_curve(10, 0.4, model, std::vector<std::int64_t>{}), PreconditionError);
}

TEST_CASE("synaptic state counts") {
  CHECK(synaptic_state_count(2.8, 0.2) == 15);
  CHECK(synaptic_state_count(6.0, 0.2) == 31);
  CHECK(synaptic_state_count(0.0, 0.2) == 1);
  CHECK(synaptic_state_count_by_precision(0.1, 3.42) == 35);
  CHECK(synaptic_state_count_by_precision(0.1, 0.0) == 1);
  CHECK_THROWS_AS(synaptic_state_count(1.0, 0.0), PreconditionError);
}

TEST_CASE("write_pareto_csv") {
  const auto pts = pareto_curve(10, 0.0, energy_preset("vcma"), pulse_range(1, 2));
  std::ostringstream os;
  write_pareto_csv(os, pts, "vcma");
  CHECK(os.str() == "n_pulse,precision,energy_J,preset\n1,1,1e-12,vcma\n2,1,2e-12,vcma\n");
}
