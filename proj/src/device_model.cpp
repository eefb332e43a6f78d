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

#include "skysum/device_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "skysum/error.hpp"

namespace skysum::device {
namespace {

void check(bool ok, std::string_view path, std::string_view field, const std::string& what) {
  if (!ok) throw ValidationError(std::string(path) + "." + std::string(field), what);
}

}  // namespace

void DeviceCalibration::validate(std::string_view path) const {
  check(field_min < field_max, path, "field_min", "must be below field_max");
  check(weight_field_slope < 0.0, path, "weight_field_slope", "must be negative");
  check(duration_ref > 0.0 && duration_zero >= 0.0, path, "duration_ref",
        "durations must be positive");
  check(current_ref > 0.0 && current_threshold >= 0.0, path, "current_ref",
        "current densities must be positive");
  check(velocity_points.size() >= 2, path, "velocity_points", "need at least two points");
  for (std::size_t k = 1; k < velocity_points.size(); ++k) {
    check(velocity_points[k].current_density > velocity_points[k - 1].current_density &&
              velocity_points[k].velocity > velocity_points[k - 1].velocity,
          path, "velocity_points[" + std::to_string(k) + "]",
          "must be strictly increasing in current density and velocity");
  }
  check(velocity_points.front().velocity >= 0.0, path, "velocity_points[0]",
        "velocity must be non-negative");
  check(hall_angle >= 0.0 && hall_angle < 90.0, path, "hall_angle", "must be in [0, 90)");
  check(per_skyrmion_voltage_mean > 0.0, path, "per_skyrmion_voltage_mean", "must be positive");
  check(per_skyrmion_voltage_std >= 0.0, path, "per_skyrmion_voltage_std",
        "must be non-negative");
  check(skyrmion_diameter > 0.0, path, "skyrmion_diameter", "must be positive");
  check(track_width > 0.0, path, "track_width", "must be positive");
  check(track_length > 0.0, path, "track_length", "must be positive");
  check(notch_depth_fraction > 0.0 && notch_depth_fraction < 1.0, path, "notch_depth_fraction",
        "must be in (0, 1)");
  check(multilayer_thickness > 0.0, path, "multilayer_thickness", "must be positive");
  check(notch_x >= 0.0 && notch_x <= track_length, path, "notch_x", "must lie on the track");
  check(full_reversal_voltage > per_skyrmion_voltage_mean, path, "full_reversal_voltage",
        "must exceed the per-skyrmion voltage");
  check(read_current > 0.0, path, "read_current", "must be positive");
}

DeviceCalibration preset(std::string_view name) {
  if (name == "paper2024") return DeviceCalibration{};
  if (name == "paper2024_twotrack") {
    DeviceCalibration cal;
    cal.current_ref = 116.0;
    cal.current_threshold = 100.0;
    return cal;
  }
  throw ValidationError("calibration.preset", "unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() { return {"paper2024", "paper2024_twotrack"}; }

void PulseTrain::validate(std::string_view path) const {
  check(count >= 0, path, "count", "must be non-negative");
  check(current_density > 0.0, path, "current_density", "must be positive");
  check(duration > 0.0, path, "duration", "must be positive");
}

FieldWeight weight_from_field(const DeviceCalibration& cal, FieldSetting field) {
  if (field.h_z < cal.field_min) {
    throw StripeDomainRegime("field " + std::to_string(field.h_z) +
                             " mT is below the stripe-domain floor");
  }
  if (field.h_z > cal.field_max) return {0.0, true};
  return {std::max(0.0, std::abs(cal.weight_field_slope) * (cal.field_max - field.h_z)), false};
}

double weight_scale_duration(const DeviceCalibration& cal, double duration_ns) {
  detail::require(duration_ns > 0.0, "weight_scale_duration: duration must be positive");
  if (cal.duration_ref == cal.duration_zero) {
    throw DegenerateCalibration("duration_ref equals duration_zero");
  }
  return std::max(0.0, (duration_ns - cal.duration_zero) / (cal.duration_ref - cal.duration_zero));
}

double weight_scale_current(const DeviceCalibration& cal, double j) {
  detail::require(j > 0.0, "weight_scale_current: current density must be positive");
  if (cal.current_ref <= cal.current_threshold) {
    throw DegenerateCalibration("current_ref must exceed current_threshold");
  }
  const double th2 = cal.current_threshold * cal.current_threshold;
  return std::max(0.0, (j * j - th2) / (cal.current_ref * cal.current_ref - th2));
}

double synaptic_weight(const DeviceCalibration& cal, FieldSetting field, const PulseTrain& pulse) {
  return weight_from_field(cal, field).sk_per_pulse * weight_scale_duration(cal, pulse.duration) *
         weight_scale_current(cal, pulse.current_density);
}

double velocity_from_current(const DeviceCalibration& cal, double j) {
  const auto& pts = cal.velocity_points;
  if (pts.empty() || j < pts.front().current_density || j > pts.back().current_density) {
    throw ExtrapolationError("current density " + std::to_string(j) +
                             " GA/m^2 is outside the velocity calibration table");
  }
  auto hi = std::lower_bound(pts.begin(), pts.end(), j, [](const VelocityPoint& p, double v) {
    return p.current_density < v;
  });
  if (hi->current_density == j) return hi->velocity;
  auto lo = hi - 1;
  const double t = (j - lo->current_density) / (hi->current_density - lo->current_density);
  return lo->velocity + t * (hi->velocity - lo->velocity);
}

double current_density(double total_current_mA, const DeviceCalibration& cal) {
  detail::require(total_current_mA > 0.0, "current_density: total current must be positive");
  // mA / (µm * nm) = 1e-3 A / 1e-15 m² = 1e12 A/m² = 1e3 GA/m²
  return total_current_mA / (cal.track_width * cal.multilayer_thickness) * 1e3;
}

}  // namespace skysum::device
