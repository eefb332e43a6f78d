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

#include <string>
#include <string_view>
#include <vector>

namespace skysum::device {

/// One point of the velocity calibration table.
struct VelocityPoint {
  double current_density = 0.0;  ///< GA/m²
  double velocity = 0.0;         ///< m/s
};

/// Phenomenological constants of a skyrmion synapse device.
///
/// Units: fields in mT, durations in ns, current densities in GA/m²,
/// lengths in µm except `skyrmion_diameter` and `multilayer_thickness` (nm),
/// voltages in nV, read current in µA.
struct DeviceCalibration {
  double weight_field_slope = -0.57;  ///< skyrmions per pulse per mT
  double field_max = 26.0;            ///< weight-zero cutoff
  double field_min = 20.0;            ///< stripe-domain floor
  double duration_ref = 50.0;
  double duration_zero = 30.0;
  double current_ref = 171.0;
  double current_threshold = 140.0;
  std::vector<VelocityPoint> velocity_points{{150.0, 3.0}, {200.0, 30.0}};
  double hall_angle = 15.0;  ///< degrees
  double per_skyrmion_voltage_mean = 22.0;
  double per_skyrmion_voltage_std = 7.0;
  double skyrmion_diameter = 222.0;
  double track_width = 6.0;
  double track_length = 40.0;
  double notch_depth_fraction = 0.17;
  double multilayer_thickness = 85.0;
  /// Longitudinal notch position on the input side of the track.
  double notch_x = 5.0;
  /// Hall shift for full reversal of a 36 µm² detection zone. Back-computed
  /// from a 222 nm diameter; not a measured value.
  double full_reversal_voltage = 20460.0;
  double read_current = 100.0;

  /// Throws ValidationError naming the offending field (prefixed by `path`).
  void validate(std::string_view path = "calibration") const;

  double notch_y() const noexcept { return notch_depth_fraction * track_width; }
};

/// Named presets. "paper2024" is the single-track building block;
/// "paper2024_twotrack" is the two-track summing device, whose pulses are
/// referenced to 116 GA/m².
DeviceCalibration preset(std::string_view name);
std::vector<std::string> preset_names();

enum class Polarity { forward, reverse };

struct PulseTrain {
  int count = 0;
  double current_density = 171.0;
  double duration = 50.0;
  Polarity polarity = Polarity::forward;

  void validate(std::string_view path = "pulse") const;
};

struct FieldSetting {
  double h_z = 24.0;  ///< mT
};

struct FieldWeight {
  double sk_per_pulse = 0.0;
  /// Set when the field is above the cutoff and the weight was clamped to 0.
  bool range_warning = false;
};

/// Skyrmions nucleated per pulse at the reference pulse, from the linear
/// field law. Throws StripeDomainRegime below field_min.
FieldWeight weight_from_field(const DeviceCalibration& cal, FieldSetting field);

/// Linear duration factor, 1 at duration_ref and 0 at (and below) duration_zero.
double weight_scale_duration(const DeviceCalibration& cal, double duration_ns);

/// Quadratic current factor, 1 at current_ref and 0 at (and below) the threshold.
double weight_scale_current(const DeviceCalibration& cal, double j);

/// Separable composite weight: field law times duration and current factors.
double synaptic_weight(const DeviceCalibration& cal, FieldSetting field, const PulseTrain& pulse);

/// Piecewise-linear interpolation of the velocity table. Throws
/// ExtrapolationError outside the table.
double velocity_from_current(const DeviceCalibration& cal, double j);

/// Average current density (GA/m²) for a total current in mA.
double current_density(double total_current_mA, const DeviceCalibration& cal);

}  // namespace skysum::device
