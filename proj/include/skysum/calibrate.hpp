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

#include <filesystem>
#include <optional>
#include <string>

#include "skysum/device_model.hpp"
#include "skysum/io.hpp"

namespace skysum::calibrate {

struct FieldLawFit {
  double slope = 0.0;      ///< skyrmions per pulse per mT
  double field_max = 0.0;  ///< zero crossing, mT
  double r_squared = 0.0;
  int fields_used = 0;
};

/// Fits per-trace weights from a nucleation_sweep traces.csv (field series),
/// then the weight-field line through the fields with positive mean weight.
FieldLawFit fit_field_law(const io::CsvTable& traces);

/// Fraction of per-pulse counts != 1 at the field whose mean weight is
/// closest to 1 (within 0.1); absent when no field qualifies.
std::optional<double> estimate_pbar(const io::CsvTable& traces);

/// Slope of ΔV against n_detec over the pulsing samples of a detection trace.
double fit_per_skyrmion_voltage(const io::CsvTable& trace);

struct CalibrationResult {
  device::DeviceCalibration calibration;
  io::Json document;  ///< {"calibration": {"preset", "overrides"}, "fit": {...}}
};

CalibrationResult calibrate(const std::string& preset, const std::filesystem::path& traces_csv,
                            const std::optional<std::filesystem::path>& detection_csv);

}  // namespace skysum::calibrate
