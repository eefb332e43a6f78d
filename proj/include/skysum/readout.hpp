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
#include <optional>
#include <string_view>
#include <vector>

#include "skysum/device_model.hpp"
#include "skysum/nucleation.hpp"
#include "skysum/rng.hpp"
#include "skysum/transport.hpp"

namespace skysum::readout {

/// `hold` marks measurements taken between pulsing phases with no input.
enum class Phase { baseline, pulsing, hold, post, reset };

std::string_view phase_name(Phase p) noexcept;

struct Sample {
  std::int64_t index = 0;
  Phase phase = Phase::baseline;
  double delta_v = 0.0;  ///< nV
  std::int64_t n_detec = 0;
};

struct MeasurementTrace {
  std::vector<Sample> samples;
  double read_current = 100.0;  ///< µA

  /// Throws PreconditionError unless indices are strictly increasing.
  void check_invariants() const;
};

struct ReadoutNoise {
  bool enabled = false;
  double sigma_meas = 25.0;  ///< nV, post-averaging measurement noise

  void validate(std::string_view path = "noise") const;
};

/// Noise-free Hall shift: n · per_skyrmion_voltage_mean.
double hall_voltage(std::int64_t n_detec, const device::DeviceCalibration& cal);

/// Draws two normals per call (skyrmion spread, measurement noise) even when
/// noise is disabled, so stream positions do not depend on the noise flag.
double hall_voltage(std::int64_t n_detec, const device::DeviceCalibration& cal,
                    const ReadoutNoise& noise, Stream& rng);

/// Rescales a voltage computed at cal.read_current to another read current.
double scale_to_read_current(double delta_v, const device::DeviceCalibration& cal,
                             double read_current_uA);

/// How nucleated skyrmions reach the detection zone.
enum class Delivery {
  kinematic,  ///< notch nucleation, Hall-angle transport, capacity, edge losses
  direct      ///< every nucleated skyrmion is counted; no losses or capacity
};

std::string_view delivery_name(Delivery d) noexcept;
std::optional<Delivery> parse_delivery(std::string_view s) noexcept;

struct DriftModel {
  double offset = 0.0;  ///< nV
  double slope = 0.0;   ///< nV per sample index
};

/// A single-track Hall-cross device under test.
struct DetectionDevice {
  device::DeviceCalibration cal;
  device::FieldSetting field{24.0};
  device::PulseTrain pulse{1, 171.0, 50.0, device::Polarity::forward};
  nucleation::StochasticModel stochastic;
  transport::DetectionZone zone;
  /// Skyrmions per pulse; bypasses the field/duration/current laws when set.
  std::optional<double> weight_override;
  Delivery delivery = Delivery::kinematic;
  ReadoutNoise noise;
  DriftModel drift;

  /// Device with the default zone for `cal`.
  static DetectionDevice with_defaults(const device::DeviceCalibration& cal);
  double weight() const;
};

struct ProtocolStep {
  Phase phase = Phase::baseline;
  /// Samples for baseline/hold/post, pulses for pulsing; ignored for reset.
  int count = 0;
};

struct ProtocolSpec {
  std::vector<ProtocolStep> steps;

  /// baseline -> pulsing -> reset -> post, the single-track detection sequence.
  static ProtocolSpec detection(int baseline, int pulses, int post);
  /// Throws ProtocolError unless phases run baseline, pulsing/hold, reset, post
  /// (each group optional) with at most one reset.
  void validate() const;
};

/// Runs the protocol: one sample per baseline/hold/post step, one pulse then
/// one sample per pulsing step; reset clears the track without sampling.
MeasurementTrace measure_protocol(const DetectionDevice& dev, const ProtocolSpec& spec,
                                  Stream& rng);

struct DriftFit {
  double intercept = 0.0;
  double slope = 0.0;
};

/// Least-squares line through the baseline and post samples.
DriftFit fit_drift(const MeasurementTrace& trace);

/// Subtracts fit_drift() from every sample. Throws InsufficientData when fewer
/// than two distinct baseline/post indices are available.
MeasurementTrace drift_correct(const MeasurementTrace& trace);

struct MtjConfig {
  double r_parallel = 1000.0;   ///< Ω
  double tmr = 1.0;             ///< R_AP = R_P (1 + tmr)
  double junction_area = 1.0;   ///< µm²
  double read_current = 10.0;   ///< µA

  void validate(std::string_view path = "mtj") const;
};

/// Output voltage (mV) at skyrmion area coverage x ∈ [0, 1] with two-channel
/// conduction G = (1 - x)/R_P + x/R_AP.
double mtj_voltage_from_coverage(double x, const MtjConfig& mtj);

/// Coverage of `n_sk` skyrmions (may be fractional for expectations).
double mtj_coverage(double n_sk, const MtjConfig& mtj, const device::DeviceCalibration& cal);

double mtj_activation(std::int64_t n_detec, const MtjConfig& mtj,
                      const device::DeviceCalibration& cal);

/// Inverts ΔV_sk/ΔV_full = (π d²/4)/A_zone for d in nm.
double estimate_diameter(double delta_v_per_sk, double delta_v_full_reversal,
                         const transport::DetectionZone& zone);

/// Forward model: full-reversal voltage implied by a diameter (nm).
double full_reversal_voltage(double delta_v_per_sk, double diameter_nm,
                             const transport::DetectionZone& zone);

/// CSV with header "index,phase,delta_v_nV,n_detec".
void write_trace_csv(std::ostream& os, const MeasurementTrace& trace);

}  // namespace skysum::readout
