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
#include "skysum/netmap.hpp"

using namespace skysum;
using namespace skysum::netmap;
using device::DeviceCalibration;
using doctest::Approx;

TEST_CASE("quantize examples") {
  const DeviceCalibration cal;
  const auto two = quantize({1, 2, {-1.0, 1.0}}, 2, cal);
  CHECK(two.quantized(0, 0) == -1.0);
  CHECK(two.quantized(0, 1) == 1.0);

  const auto q = quantize({1, 2, {0.37, 1.0}}, 15, cal);
  CHECK(q.pos_level[0] == 5);
  CHECK(q.quantized(0, 0) == Approx(5.0 / 14.0));
  CHECK(std::abs(q.quantized(0, 0) - 0.37) <= q.spacing() / 2.0);

  const auto id = quantize({2, 2, {1.0, 0.0, 0.0, 1.0}}, 15, cal);
  CHECK(id.pos_level == std::vector<int>{14, 0, 0, 14});
  CHECK(id.quantized(0, 1) == 0.0);

  const auto zero = quantize({2, 2, {0.0, 0.0, 0.0, 0.0}}, 15, cal);
  for (int l : zero.pos_level) CHECK(l == 0);
  CHECK(zero.quantized(1, 1) == 0.0);

  CHECK_THROWS_AS(quantize({1, 1, {1.0}}, 1, cal), PreconditionError);
  CHECK_THROWS_AS(quantize({2, 2, {1.0}}, 15, cal), DimensionMismatch);
}

TEST_CASE("quantization error bound on random matrices") {
  const DeviceCalibration cal;
  Stream rng(8, 8);
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = 1 + static_cast<int>(rng.next_u32() % 6);
    const int cols = 1 + static_cast<int>(rng.next_u32() % 6);
    const int states = 2 + static_cast<int>(rng.next_u32() % 30);
    Matrix m{rows, cols, {}};
    for (int k = 0; k < rows * cols; ++k) m.data.push_back(4.0 * rng.uniform() - 2.0);
    const auto q = quantize(m, states, cal);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        REQUIRE(std::abs(q.quantized(i, j) - m.at(i, j)) <= q.spacing() / 2.0 * (1.0 + 1e-12));
        const auto k = static_cast<std::size_t>(i * cols + j);
        REQUIRE((q.pos_level[k] == 0 || q.neg_level[k] == 0));
        REQUIRE(q.pos_level[k] < states);
      }
    }
  }
}

TEST_CASE("field_for_weight") {
  const DeviceCalibration cal;
  CHECK(field_for_weight(0.0, cal).h_z == 26.0);
  CHECK(field_for_weight(1.14, cal).h_z == Approx(24.0).epsilon(1e-12));
  CHECK(field_for_weight(3.42, cal).h_z == Approx(20.0).epsilon(1e-12));
  CHECK_THROWS_AS(field_for_weight(3.5, cal), OutOfRange);
  for (double w = 0.0; w <= 3.42; w += 0.01) {
    const double back = device::weight_from_field(cal, field_for_weight(w, cal)).sk_per_pulse;
    CHECK(std::abs(back - w) < 1e-12);
  }
}

TEST_CASE("infer expected mode") {
  const DeviceCalibration cal;
  const auto id = quantize({2, 2, {1.0, 0.0, 0.0, 1.0}}, 15, cal);
  const std::vector<std::int64_t> x{3, 5};
  const auto y = infer(id, x, cal);
  CHECK(y == std::vector<double>{3.0, 5.0});
  const std::vector<std::int64_t> zero{0, 0};
  CHECK(infer(id, zero, cal) == std::vector<double>{0.0, 0.0});
  InferOptions mtj;
  mtj.readout = crossbar::ReadoutMode::mtj;
  CHECK(infer(id, zero, cal, mtj) == std::vector<double>{0.0, 0.0});
  const std::vector<std::int64_t> bad{1};
  CHECK_THROWS_AS(infer(id, bad, cal), DimensionMismatch);

  Stream rng(4, 4);
  for (int t = 0; t < 50; ++t) {
    Matrix m{3, 4, {}};
    for (int k = 0; k < 12; ++k) m.data.push_back(2.0 * rng.uniform() - 1.0);
    const auto q = quantize(m, 15, cal);
    std::vector<std::int64_t> in{rng.next_u32() % 50, rng.next_u32() % 50, rng.next_u32() % 50};
    const auto out = infer(q, in, cal);
    for (int j = 0; j < 4; ++j) {
      long long levels = 0;
      for (int i = 0; i < 3; ++i) {
        const auto k = static_cast<std::size_t>(i * 4 + j);
        levels += (q.pos_level[k] - q.neg_level[k]) * in[static_cast<std::size_t>(i)];
      }
      CHECK(out[static_cast<std::size_t>(j)] == static_cast<double>(levels) * q.spacing());
    }
  }
}

TEST_CASE("infer stochastic mode converges to expected mode") {
  const DeviceCalibration cal;
  const auto q = quantize({2, 2, {0.8, -0.3, 0.5, 1.0}}, 15, cal);
  const std::vector<std::int64_t> x{20, 30};
  const auto expected = infer(q, x, cal);
  InferOptions opt;
  opt.mode = InferMode::stochastic;
  opt.stochastic.p_bar = 0.4;
  opt.seed = 17;
  std::vector<double> mean(2, 0.0);
  constexpr int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    opt.trial = static_cast<std::uint64_t>(t);
    const auto y = infer(q, x, cal, opt);
    for (int j = 0; j < 2; ++j) mean[j] += y[j] / trials;
  }
  for (int j = 0; j < 2; ++j) CHECK(std::abs(mean[j] / expected[j] - 1.0) < 0.02);

  opt.stochastic.p_bar = 0.0;
  opt.trial = 0;
  const auto exact = infer(q, x, cal, opt);
  // With no deviations only fractional-weight rounding remains.
  for (int j = 0; j < 2; ++j) CHECK(std::abs(exact[j] - expected[j]) <= 2.0 * q.scale() + 1e-9);
}

TEST_CASE("to_crossbar and programming_schedule") {
  const DeviceCalibration cal;
  const auto q = quantize({1, 2, {1.0, -0.5}}, 3, cal);
  const auto cfg = to_crossbar(q);
  CHECK(cfg.m_tracks == 1);
  CHECK(cfg.l_columns == 4);
  CHECK(cfg.weights[0] == Approx(3.42));
  CHECK(cfg.weights[1] == 0.0);
  CHECK(cfg.weights[2] == 0.0);
  CHECK(cfg.weights[3] == Approx(1.71));
  CHECK_NOTHROW(cfg.validate(cal));

  const auto sched = programming_schedule(q, cal);
  REQUIRE(sched.size() == 4);
  CHECK(sched[0].positive);
  CHECK(sched[0].h_z == Approx(20.0));
  CHECK(sched[1].h_z == 26.0);
  CHECK(sched[3].level == 1);
  CHECK(sched[3].h_z == Approx(23.0));
}

TEST_CASE("read_matrix_csv") {
  std::istringstream ok("# weights\n1, -2.5\n\n0.5,3 # trailing\n");
  const auto m = read_matrix_csv(ok);
  CHECK(m.rows == 2);
  CHECK(m.cols == 2);
  CHECK(m.at(1, 0) == 0.5);
  std::istringstream ragged("1,2\n3\n");
  try {
    read_matrix_csv(ragged);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.path() == "weights:2");
  }
  std::istringstream junk("1,abc\n");
  CHECK_THROWS_AS(read_matrix_csv(junk), ValidationError);
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(read_matrix_csv(empty), DimensionMismatch);
}
