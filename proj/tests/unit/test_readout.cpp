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

#include "skysum/error.hpp"
#include "skysum/readout.hpp"
#include "support/oracles.hpp"

using namespace skysum;
using namespace skysum::readout;
using device::DeviceCalibration;
using doctest::Approx;

namespace {

DetectionDevice unit_device(bool noisy) {
  auto dev = DetectionDevice::with_defaults(DeviceCalibration{});
  dev.weight_override = 1.0;
  dev.pulse = {1, 150.0, 50.0};
  dev.noise.enabled = noisy;
  return dev;
}

MeasurementTrace synthetic(double offset, double slope) {
  MeasurementTrace t;
  std::int64_t i = 0;
  for (int k = 0; k < 10; ++k, ++i) t.samples.push_back({i, Phase::baseline, offset + slope * i, 0});
  for (int k = 0; k < 20; ++k, ++i) {
    t.samples.push_back({i, Phase::pulsing, offset + slope * i + 22.0 * (k + 1), k + 1});
  }
  for (int k = 0; k < 10; ++k, ++i) t.samples.push_back({i, Phase::post, offset + slope * i, 0});
  return t;
}

}  // namespace

TEST_CASE("hall_voltage noise-free") {
  const DeviceCalibration cal;
  CHECK(hall_voltage(0, cal) == 0.0);
  CHECK(hall_voltage(8, cal) == 176.0);
  CHECK(hall_voltage(20, cal) == 440.0);
  for (int a = 0; a < 30; a += 7) {
    for (int b = 0; b < 30; b += 5) CHECK(hall_voltage(a + b, cal) == hall_voltage(a, cal) + hall_voltage(b, cal));
  }
  CHECK_THROWS_AS(hall_voltage(-1, cal), PreconditionError);
  Stream rng(1, 1);
  CHECK(hall_voltage(8, cal, ReadoutNoise{}, rng) == 176.0);
}

TEST_CASE("hall_voltage noisy moments") {
  const DeviceCalibration cal;
  const ReadoutNoise noise{true, 25.0};
  Stream rng(5, 5);
  constexpr int n = 100000;
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = hall_voltage(1, cal, noise, rng);
    s += v;
    ss += v * v;
  }
  const double mean = s / n;
  const double sd = std::sqrt(ss / n - mean * mean);
  const double expected_sd = std::sqrt(7.0 * 7.0 + 25.0 * 25.0);
  CHECK(std::abs(mean - 22.0) < 4.0 * expected_sd / std::sqrt(double(n)));
  CHECK(sd == Approx(expected_sd).epsilon(0.01));
}

TEST_CASE("noise flag does not shift the stream") {
  const DeviceCalibration cal;
  Stream a(9, 9), b(9, 9);
  hall_voltage(3, cal, ReadoutNoise{false, 25.0}, a);
  hall_voltage(3, cal, ReadoutNoise{true, 25.0}, b);
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("scale_to_read_current") {
  const DeviceCalibration cal;
  CHECK(scale_to_read_current(440.0, cal, 50.0) == Approx(220.0));
  CHECK_THROWS_AS(scale_to_read_current(1.0, cal, 0.0), PreconditionError);
}

TEST_CASE("measure_protocol: 20 unit pulses give 440 nV") {
  const auto dev = unit_device(false);
  Stream rng(1, 0);
  const auto trace = measure_protocol(dev, ProtocolSpec::detection(10, 20, 10), rng);
  REQUIRE(trace.samples.size() == 40);
  trace.check_invariants();
  CHECK(trace.samples[0].phase == Phase::baseline);
  CHECK(trace.samples[9].delta_v == 0.0);
  for (int k = 0; k < 20; ++k) {
    CHECK(trace.samples[10 + k].phase == Phase::pulsing);
    CHECK(trace.samples[10 + k].n_detec == k + 1);
  }
  CHECK(trace.samples[29].delta_v == 440.0);
  for (int k = 30; k < 40; ++k) {
    CHECK(trace.samples[k].phase == Phase::post);
    CHECK(trace.samples[k].delta_v == 0.0);
  }
}

TEST_CASE("measure_protocol: direct delivery matches kinematic when nothing is lost") {
  auto kin = unit_device(true);
  auto dir = kin;
  dir.delivery = Delivery::direct;
  dir.stochastic.p_bar = kin.stochastic.p_bar = 0.4;
  Stream a(4, 4), b(4, 4);
  const auto ta = measure_protocol(kin, ProtocolSpec::detection(5, 20, 5), a);
  const auto tb = measure_protocol(dir, ProtocolSpec::detection(5, 20, 5), b);
  REQUIRE(ta.samples.size() == tb.samples.size());
  for (std::size_t i = 0; i < ta.samples.size(); ++i) {
    CHECK(ta.samples[i].n_detec == tb.samples[i].n_detec);
    CHECK(ta.samples[i].delta_v == tb.samples[i].delta_v);
  }
}

TEST_CASE("measure_protocol: zero pulses stay at baseline") {
  auto dev = unit_device(false);
  Stream rng(1, 0);
  const auto trace = measure_protocol(dev, ProtocolSpec::detection(10, 0, 10), rng);
  CHECK(trace.samples.size() == 20);
  for (const auto& s : trace.samples) CHECK(s.delta_v == 0.0);
}

TEST_CASE("measure_protocol: kinematic capacity saturates") {
  auto dev = unit_device(false);
  dev.weight_override = 3.0;
  dev.zone.capacity = 10;
  Stream rng(1, 0);
  const auto trace = measure_protocol(dev, ProtocolSpec::detection(0, 20, 0), rng);
  CHECK(trace.samples.back().n_detec == 10);
  for (std::size_t i = 1; i < trace.samples.size(); ++i) {
    CHECK(trace.samples[i].n_detec >= trace.samples[i - 1].n_detec);
  }
}

TEST_CASE("measure_protocol: noisy post-reset baseline within 3 sigma") {
  const auto dev = unit_device(true);
  int inside = 0;
  constexpr int runs = 500;
  for (int r = 0; r < runs; ++r) {
    Stream rng(77, static_cast<std::uint64_t>(r));
    const auto t = measure_protocol(dev, ProtocolSpec::detection(10, 20, 10), rng);
    inside += std::abs(t.samples.back().delta_v) <= 3.0 * dev.noise.sigma_meas;
  }
  CHECK(inside >= runs * 0.99);
}

TEST_CASE("measure_protocol: drift is additive in the index") {
  auto dev = unit_device(false);
  dev.drift = {100.0, 0.5};
  Stream rng(1, 0);
  const auto t = measure_protocol(dev, ProtocolSpec::detection(10, 20, 10), rng);
  for (const auto& s : t.samples) {
    CHECK(s.delta_v == Approx(22.0 * s.n_detec + 100.0 + 0.5 * s.index));
  }
}

TEST_CASE("protocol validation") {
  const auto dev = unit_device(false);
  Stream rng(1, 0);
  ProtocolSpec bad{{{Phase::post, 1}, {Phase::baseline, 1}}};
  CHECK_THROWS_AS(measure_protocol(dev, bad, rng), ProtocolError);
  ProtocolSpec two_resets{{{Phase::reset, 0}, {Phase::reset, 0}}};
  CHECK_THROWS_AS(two_resets.validate(), ProtocolError);
  ProtocolSpec negative{{{Phase::baseline, -1}}};
  CHECK_THROWS_AS(negative.validate(), ProtocolError);
  ProtocolSpec holds{{{Phase::baseline, 2},
                      {Phase::pulsing, 3},
                      {Phase::hold, 2},
                      {Phase::pulsing, 3},
                      {Phase::hold, 2},
                      {Phase::reset, 0},
                      {Phase::post, 2}}};
  CHECK_NOTHROW(holds.validate());
  CHECK(measure_protocol(dev, holds, rng).samples.size() == 14);
}

TEST_CASE("drift_correct") {
  SUBCASE("drift-free trace unchanged") {
    const auto t = synthetic(0.0, 0.0);
    const auto c = drift_correct(t);
    for (std::size_t i = 0; i < t.samples.size(); ++i) {
      CHECK(std::abs(c.samples[i].delta_v - t.samples[i].delta_v) < 1e-9);
    }
  }
  SUBCASE("linear drift removed") {
    const auto c = drift_correct(synthetic(0.0, 0.5));
    double base = 0.0;
    for (int i = 0; i < 10; ++i) base += c.samples[i].delta_v / 10.0;
    CHECK(std::abs(base) < 0.1);
    CHECK(c.samples[29].delta_v == Approx(440.0));
  }
  SUBCASE("constant offset") {
    const auto t = synthetic(100.0, 0.0);
    const auto fit = fit_drift(t);
    CHECK(fit.intercept == Approx(100.0));
    CHECK(std::abs(fit.slope) < 1e-12);
  }
  SUBCASE("idempotent") {
    const auto once = drift_correct(synthetic(30.0, -0.25));
    const auto twice = drift_correct(once);
    for (std::size_t i = 0; i < once.samples.size(); ++i) {
      CHECK(std::abs(once.samples[i].delta_v - twice.samples[i].delta_v) < 1e-9);
    }
  }
  SUBCASE("insufficient data") {
    MeasurementTrace t;
    t.samples.push_back({0, Phase::baseline, 1.0, 0});
    t.samples.push_back({1, Phase::pulsing, 1.0, 0});
    CHECK_THROWS_AS(drift_correct(t), InsufficientData);
  }
}

TEST_CASE("trace invariants") {
  MeasurementTrace t;
  t.samples.push_back({1, Phase::baseline, 0.0, 0});
  t.samples.push_back({1, Phase::baseline, 0.0, 0});
  CHECK_THROWS_AS(t.check_invariants(), PreconditionError);
}

TEST_CASE("mtj examples") {
  const MtjConfig mtj;
  CHECK(mtj_voltage_from_coverage(0.0, mtj) == Approx(10.0).epsilon(1e-12));
  CHECK(mtj_voltage_from_coverage(0.5, mtj) == Approx(40.0 / 3.0).epsilon(1e-12));
  CHECK(mtj_voltage_from_coverage(1.0, mtj) == Approx(20.0).epsilon(1e-12));
  CHECK(mtj_activation(0, mtj, DeviceCalibration{}) == Approx(10.0).epsilon(1e-12));
  CHECK(mtj_activation(1000, mtj, DeviceCalibration{}) == Approx(20.0).epsilon(1e-12));
  CHECK_THROWS_AS(mtj_voltage_from_coverage(1.1, mtj), PreconditionError);
  CHECK_THROWS_AS(mtj_activation(-1, mtj, DeviceCalibration{}), PreconditionError);
  MtjConfig bad;
  bad.tmr = -0.1;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("mtj property: monotone, convex, tmr = 0 constant") {
  Stream rng(99, 0);
  for (int k = 0; k < 1000; ++k) {
    MtjConfig mtj;
    mtj.tmr = 0.01 + 3.0 * rng.uniform();
    mtj.r_parallel = 100.0 + 1e4 * rng.uniform();
    double prev = -1.0, prev_d = -1e300;
    for (int i = 0; i <= 20; ++i) {
      const double x = i / 20.0;
      const double v = mtj_voltage_from_coverage(x, mtj);
      CHECK(v == Approx(oracle::mtj_mv(x, mtj.tmr, mtj.r_parallel, mtj.read_current)).epsilon(1e-12));
      REQUIRE(v > prev);
      if (i > 0) {
        const double d = v - prev;
        REQUIRE(d >= prev_d * (1.0 - 1e-12));
        prev_d = d;
      }
      prev = v;
    }
    CHECK(mtj_voltage_from_coverage(1.0, mtj) ==
          mtj.read_current * 1e-3 * (mtj.r_parallel * (1.0 + mtj.tmr)));
  }
  MtjConfig flat;
  flat.tmr = 0.0;
  for (int i = 0; i <= 10; ++i) CHECK(mtj_voltage_from_coverage(i / 10.0, flat) == Approx(10.0).epsilon(1e-14));
}

TEST_CASE("estimate_diameter") {
  const transport::DetectionZone zone;
  CHECK(estimate_diameter(22.0, 20460.0, zone) == Approx(222.0).epsilon(2e-3));
  CHECK(estimate_diameter(22.0, 20460.0, zone) == Approx(oracle::diameter_nm(22.0, 20460.0, 6.0)).epsilon(1e-12));
  CHECK(estimate_diameter(0.0, 20460.0, zone) == 0.0);
  CHECK(estimate_diameter(44.0, 40920.0, zone) == Approx(estimate_diameter(22.0, 20460.0, zone)).epsilon(1e-15));
  CHECK_THROWS_AS(estimate_diameter(20460.0, 20460.0, zone), InvalidRatio);
  for (double d = 50.0; d < 2000.0; d *= 1.37) {
    const double full = full_reversal_voltage(22.0, d, zone);
    CHECK(std::abs(estimate_diameter(22.0, full, zone) / d - 1.0) < 1e-6);
  }
}

TEST_CASE("write_trace_csv") {
  MeasurementTrace t;
  t.samples.push_back({0, Phase::baseline, 0.0, 0});
  t.samples.push_back({1, Phase::pulsing, 22.5, 1});
  std::ostringstream os;
  write_trace_csv(os, t);
  CHECK(os.str() == "index,phase,delta_v_nV,n_detec\n0,baseline,0,0\n1,pulsing,22.5,1\n");
}

TEST_CASE("delivery names") {
  CHECK(parse_delivery("direct") == Delivery::direct);
  CHECK(parse_delivery("kinematic") == Delivery::kinematic);
  CHECK_FALSE(parse_delivery("teleport").has_value());
  CHECK(delivery_name(Delivery::direct) == "direct");
}
