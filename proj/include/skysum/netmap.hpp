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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "skysum/crossbar.hpp"
#include "skysum/device_model.hpp"
#include "skysum/nucleation.hpp"
#include "skysum/readout.hpp"

namespace skysum::netmap {

/// Row-major real matrix; rows index inputs (tracks), cols index outputs.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  double at(int i, int j) const { return data[static_cast<std::size_t>(i * cols + j)]; }
  void check() const;
};

/// Signed weights quantised onto a uniform magnitude grid k·w_max/(states-1)
/// and split into non-negative positive/negative parts for differential
/// column pairs.
struct QuantizedLayer {
  Matrix weights;
  int states = 15;
  double w_max = 0.0;
  std::vector<int> pos_level;  ///< row-major, 0..states-1
  std::vector<int> neg_level;
  /// Device weight of the top level (skyrmions/pulse), i.e. the weight at field_min.
  double device_max = 0.0;

  double spacing() const noexcept { return states > 1 ? w_max / (states - 1) : 0.0; }
  /// Device weight of one level step, skyrmions per pulse.
  double device_quantum() const noexcept { return device_max / (states - 1); }
  /// Network weight units per skyrmion/pulse.
  double scale() const noexcept { return device_max > 0.0 ? w_max / device_max : 0.0; }
  double quantized(int i, int j) const;
  int rows() const noexcept { return weights.rows; }
  int cols() const noexcept { return weights.cols; }
};

QuantizedLayer quantize(const Matrix& weights, int states, const device::DeviceCalibration& cal);

/// Inverse of the field law: h_z = field_max - w/|slope|.
device::FieldSetting field_for_weight(double w_target, const device::DeviceCalibration& cal);

enum class InferMode { expected, stochastic };

struct InferOptions {
  InferMode mode = InferMode::expected;
  crossbar::ReadoutMode readout = crossbar::ReadoutMode::linear_ahe;
  readout::MtjConfig mtj;
  nucleation::StochasticModel stochastic;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
};

/// Per output column. Linear readout returns network weight units (the
/// quantised matrix-vector product in expected mode); MTJ readout returns
/// f(positive) - f(negative) in mV.
std::vector<double> infer(const QuantizedLayer& layer, std::span<const std::int64_t> input,
                          const device::DeviceCalibration& cal, const InferOptions& opt = {});

/// The differential crossbar realising `layer`: column 2j carries the
/// positive part of output j, column 2j+1 the negative part.
crossbar::CrossbarConfig to_crossbar(const QuantizedLayer& layer);

struct ProgrammingSite {
  int row = 0;
  int col = 0;
  bool positive = true;
  int level = 0;
  double weight = 0.0;  ///< skyrmions per pulse
  double h_z = 0.0;     ///< mT
};

std::vector<ProgrammingSite> programming_schedule(const QuantizedLayer& layer,
                                                  const device::DeviceCalibration& cal);

/// Numeric CSV, one row per line; blank lines and '#' comments are skipped.
Matrix read_matrix_csv(std::istream& is);

}  // namespace skysum::netmap
