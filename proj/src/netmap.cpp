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

#include "skysum/netmap.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "skysum/error.hpp"
#include "skysum/kernels.hpp"

namespace skysum::netmap {

void Matrix::check() const {
  if (rows < 1 || cols < 1) throw DimensionMismatch("matrix must be at least 1 x 1");
  if (data.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw DimensionMismatch(
        fmt::format("matrix data has {} entries, expected {} x {}", data.size(), rows, cols));
  }
}

double QuantizedLayer::quantized(int i, int j) const {
  const auto k = static_cast<std::size_t>(i * cols() + j);
  return static_cast<double>(pos_level[k] - neg_level[k]) * spacing();
}

QuantizedLayer quantize(const Matrix& weights, int states, const device::DeviceCalibration& cal) {
  weights.check();
  detail::require(states >= 2, "quantize: states must be >= 2");
  QuantizedLayer q;
  q.weights = weights;
  q.states = states;
  for (double w : weights.data) {
    detail::require(std::isfinite(w), "quantize: weights must be finite");
    q.w_max = std::max(q.w_max, std::abs(w));
  }
  q.device_max = device::weight_from_field(cal, {cal.field_min}).sk_per_pulse;
  q.pos_level.assign(weights.data.size(), 0);
  q.neg_level.assign(weights.data.size(), 0);
  if (q.w_max == 0.0) return q;
  const double step = q.spacing();
  for (std::size_t k = 0; k < weights.data.size(); ++k) {
    const double w = weights.data[k];
    const int level = std::min(states - 1, static_cast<int>(std::lround(std::abs(w) / step)));
    (w < 0.0 ? q.neg_level : q.pos_level)[k] = level;
  }
  return q;
}

device::FieldSetting field_for_weight(double w_target, const device::DeviceCalibration& cal) {
  detail::require(w_target >= 0.0, "field_for_weight: weight must be non-negative");
  const double slope = std::abs(cal.weight_field_slope);
  const double ceiling = slope * (cal.field_max - cal.field_min);
  if (w_target > ceiling * (1.0 + 1e-12)) {
    throw OutOfRange(fmt::format("weight {} exceeds the maximum {} at field_min", w_target, ceiling));
  }
  return {std::max(cal.field_min, cal.field_max - w_target / slope)};
}

crossbar::CrossbarConfig to_crossbar(const QuantizedLayer& layer) {
  crossbar::CrossbarConfig cfg;
  cfg.m_tracks = layer.rows();
  cfg.l_columns = 2 * layer.cols();
  cfg.weights.assign(static_cast<std::size_t>(cfg.m_tracks * cfg.l_columns), 0.0);
  const double quantum = layer.device_quantum();
  for (int i = 0; i < layer.rows(); ++i) {
    for (int j = 0; j < layer.cols(); ++j) {
      const auto k = static_cast<std::size_t>(i * layer.cols() + j);
      cfg.weights[static_cast<std::size_t>(i * cfg.l_columns + 2 * j)] = layer.pos_level[k] * quantum;
      cfg.weights[static_cast<std::size_t>(i * cfg.l_columns + 2 * j + 1)] =
          layer.neg_level[k] * quantum;
    }
  }
  cfg.track_resistances.assign(static_cast<std::size_t>(cfg.m_tracks), 130.0);
  cfg.delivery = readout::Delivery::direct;
  return cfg;
}

namespace {

std::vector<double> level_matrix(const std::vector<int>& levels) {
  return {levels.begin(), levels.end()};
}

}  // namespace

std::vector<double> infer(const QuantizedLayer& layer, std::span<const std::int64_t> input,
                          const device::DeviceCalibration& cal, const InferOptions& opt) {
  if (input.size() != static_cast<std::size_t>(layer.rows())) {
    throw DimensionMismatch(
        fmt::format("input has {} entries, layer has {} rows", input.size(), layer.rows()));
  }
  for (auto x : input) detail::require(x >= 0, "infer: pulse counts must be non-negative");
  const auto cols = static_cast<std::size_t>(layer.cols());
  std::vector<double> out(cols, 0.0);

  std::vector<double> n_pos(cols, 0.0), n_neg(cols, 0.0);  // in level units
  if (opt.mode == InferMode::expected) {
    // Integer levels times integer pulses: exact in double below 2^53.
    std::vector<double> x(input.begin(), input.end());
    kernels::accumulate_rows(level_matrix(layer.pos_level), x, cols, n_pos);
    kernels::accumulate_rows(level_matrix(layer.neg_level), x, cols, n_neg);
    const double quantum = layer.device_quantum();
    for (std::size_t j = 0; j < cols; ++j) {
      if (opt.readout == crossbar::ReadoutMode::mtj) {
        out[j] = readout::mtj_voltage_from_coverage(readout::mtj_coverage(n_pos[j] * quantum, opt.mtj, cal), opt.mtj) -
                 readout::mtj_voltage_from_coverage(readout::mtj_coverage(n_neg[j] * quantum, opt.mtj, cal), opt.mtj);
      } else {
        out[j] = (n_pos[j] - n_neg[j]) * layer.spacing();
      }
    }
    return out;
  }

  auto cfg = to_crossbar(layer);
  cfg.readout_mode = opt.readout;
  cfg.mtj = opt.mtj;
  crossbar::InputVector in;
  for (auto x : input) {
    in.pulses_per_track.push_back(
        {static_cast<int>(x), cal.current_ref, cal.duration_ref, device::Polarity::forward});
  }
  const auto res = crossbar::run_weighted_sum(cfg, in, opt.stochastic, cal, opt.seed, opt.trial);
  for (std::size_t j = 0; j < cols; ++j) {
    const auto& p = res[2 * j];
    const auto& n = res[2 * j + 1];
    if (opt.readout == crossbar::ReadoutMode::mtj) {
      out[j] = p.output_voltage - n.output_voltage;
    } else {
      // Skyrmion counts back to network units.
      out[j] = static_cast<double>(p.n_detec - n.n_detec) * layer.scale();
    }
  }
  return out;
}

std::vector<ProgrammingSite> programming_schedule(const QuantizedLayer& layer,
                                                  const device::DeviceCalibration& cal) {
  std::vector<ProgrammingSite> out;
  for (int i = 0; i < layer.rows(); ++i) {
    for (int j = 0; j < layer.cols(); ++j) {
      const auto k = static_cast<std::size_t>(i * layer.cols() + j);
      for (bool positive : {true, false}) {
        const int level = positive ? layer.pos_level[k] : layer.neg_level[k];
        const double w = level * layer.device_quantum();
        out.push_back({i, j, positive, level, w, field_for_weight(w, cal).h_z});
      }
    }
  }
  return out;
}

Matrix read_matrix_csv(std::istream& is) {
  Matrix m;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string cell;
    int n = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
        m.data.push_back(v);
      } catch (const std::exception&) {
        throw ValidationError(fmt::format("weights:{}", line_no), fmt::format("not a number: '{}'", cell));
      }
      ++n;
    }
    if (m.cols == 0) m.cols = n;
    if (n != m.cols) {
      throw ValidationError(fmt::format("weights:{}", line_no),
                            fmt::format("expected {} columns, got {}", m.cols, n));
    }
    ++m.rows;
  }
  m.check();
  return m;
}

}  // namespace skysum::netmap
