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

#include "skysum/readout.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "skysum/error.hpp"

namespace skysum::readout {

std::string_view phase_name(Phase p) noexcept {
  switch (p) {
    case Phase::baseline:
      return "baseline";
    case Phase::pulsing:
      return "pulsing";
    case Phase::hold:
      return "hold";
    case Phase::post:
      return "post";
    case Phase::reset:
      return "reset";
  }
  return "unknown";
}

void MeasurementTrace::check_invariants() const {
  for (std::size_t i = 1; i < samples.size(); ++i) {
    detail::require(samples[i].index > samples[i - 1].index,
                    "trace: indices must be strictly increasing");
  }
}

void ReadoutNoise::validate(std::string_view path) const {
  if (!(sigma_meas >= 0.0)) {
    throw ValidationError(std::string(path) + ".sigma_meas", "must be non-negative");
  }
}

double hall_voltage(std::int64_t n_detec, const device::DeviceCalibration& cal) {
  detail::require(n_detec >= 0, "hall_voltage: n_detec must be non-negative");
  return static_cast<double>(n_detec) * cal.per_skyrmion_voltage_mean;
}

double hall_voltage(std::int64_t n_detec, const device::DeviceCalibration& cal,
                    const ReadoutNoise& noise, Stream& rng) {
  const double clean = hall_voltage(n_detec, cal);
  const double z_sk = rng.normal();
  const double z_meas = rng.normal();
  if (!noise.enabled) return clean;
  return clean + std::sqrt(static_cast<double>(n_detec)) * cal.per_skyrmion_voltage_std * z_sk +
         noise.sigma_meas * z_meas;
}

double scale_to_read_current(double delta_v, const device::DeviceCalibration& cal,
                             double read_current_uA) {
  detail::require(read_current_uA > 0.0, "scale_to_read_current: current must be positive");
  return delta_v * read_current_uA / cal.read_current;
}

std::string_view delivery_name(Delivery d) noexcept {
  return d == Delivery::direct ? "direct" : "kinematic";
}

std::optional<Delivery> parse_delivery(std::string_view s) noexcept {
  if (s == "kinematic") return Delivery::kinematic;
  if (s == "direct") return Delivery::direct;
  return std::nullopt;
}

DetectionDevice DetectionDevice::with_defaults(const device::DeviceCalibration& cal) {
  DetectionDevice d;
  d.cal = cal;
  d.zone = transport::default_zone(cal);
  return d;
}

double DetectionDevice::weight() const {
  if (weight_override) {
    detail::require(*weight_override >= 0.0, "weight_override must be non-negative");
    return *weight_override;
  }
  return device::synaptic_weight(cal, field, pulse);
}

ProtocolSpec ProtocolSpec::detection(int baseline, int pulses, int post) {
  return {{{Phase::baseline, baseline},
           {Phase::pulsing, pulses},
           {Phase::reset, 0},
           {Phase::post, post}}};
}

namespace {

int phase_rank(Phase p) {
  switch (p) {
    case Phase::baseline:
      return 0;
    case Phase::pulsing:
    case Phase::hold:
      return 1;
    case Phase::reset:
      return 2;
    case Phase::post:
      return 3;
  }
  return 4;
}

}  // namespace

void ProtocolSpec::validate() const {
  int rank = 0;
  int resets = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    if (s.count < 0) {
      throw ProtocolError(fmt::format("protocol step {}: negative count", i));
    }
    const int r = phase_rank(s.phase);
    if (r < rank) {
      throw ProtocolError(fmt::format("protocol step {}: phase '{}' out of order", i,
                                      phase_name(s.phase)));
    }
    rank = r;
    if (s.phase == Phase::reset && ++resets > 1) {
      throw ProtocolError(fmt::format("protocol step {}: more than one reset", i));
    }
  }
}

MeasurementTrace measure_protocol(const DetectionDevice& dev, const ProtocolSpec& spec,
                                  Stream& rng) {
  spec.validate();
  dev.cal.validate();
  dev.pulse.validate();
  dev.noise.validate();
  dev.stochastic.validate();
  const double w = dev.weight();
  const bool kinematic = dev.delivery == Delivery::kinematic;
  if (kinematic) dev.zone.validate(dev.cal);

  device::PulseTrain one = dev.pulse;
  one.count = 1;
  one.polarity = device::Polarity::forward;

  transport::SkyrmionPopulation pop;
  std::int64_t direct_count = 0;
  MeasurementTrace trace;
  trace.read_current = dev.cal.read_current;
  std::int64_t index = 0;

  auto in_zone = [&]() -> std::int64_t {
    return kinematic ? static_cast<std::int64_t>(transport::count_in_zone(pop, dev.zone))
                     : direct_count;
  };
  auto measure = [&](Phase phase) {
    const std::int64_t n = in_zone();
    double v = hall_voltage(n, dev.cal, dev.noise, rng);
    v += dev.drift.offset + dev.drift.slope * static_cast<double>(index);
    trace.samples.push_back({index, phase, v, n});
    ++index;
  };

  for (const auto& step : spec.steps) {
    switch (step.phase) {
      case Phase::reset:
        transport::field_reset(pop);
        direct_count = 0;
        break;
      case Phase::pulsing:
        for (int k = 0; k < step.count; ++k) {
          const std::int32_t created = nucleation::sample_pulse_count(w, dev.stochastic, rng);
          if (kinematic) {
            transport::advance(pop, one, dev.cal);
            transport::nucleate_at(pop, dev.cal.notch_x, dev.cal.notch_y(), created);
            transport::apply_capacity(pop, dev.zone);
            pop.compact();
          } else {
            direct_count += created;
          }
          measure(Phase::pulsing);
        }
        break;
      default:
        for (int k = 0; k < step.count; ++k) measure(step.phase);
        break;
    }
  }
  return trace;
}

DriftFit fit_drift(const MeasurementTrace& trace) {
  double n = 0.0, mx = 0.0, my = 0.0;
  for (const auto& s : trace.samples) {
    if (s.phase != Phase::baseline && s.phase != Phase::post) continue;
    n += 1.0;
    mx += static_cast<double>(s.index);
    my += s.delta_v;
  }
  if (n < 2.0) throw InsufficientData("drift_correct: need >= 2 baseline/post samples");
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& s : trace.samples) {
    if (s.phase != Phase::baseline && s.phase != Phase::post) continue;
    const double dx = static_cast<double>(s.index) - mx;
    sxx += dx * dx;
    sxy += dx * (s.delta_v - my);
  }
  if (sxx == 0.0) throw InsufficientData("drift_correct: baseline/post indices coincide");
  const double slope = sxy / sxx;
  return {my - slope * mx, slope};
}

MeasurementTrace drift_correct(const MeasurementTrace& trace) {
  const auto fit = fit_drift(trace);
  MeasurementTrace out = trace;
  for (auto& s : out.samples) {
    s.delta_v -= fit.intercept + fit.slope * static_cast<double>(s.index);
  }
  return out;
}

void MtjConfig::validate(std::string_view path) const {
  const std::string p(path);
  if (!(r_parallel > 0.0)) throw ValidationError(p + ".r_parallel", "must be positive");
  if (!(tmr >= 0.0)) throw ValidationError(p + ".tmr", "must be non-negative");
  if (!(junction_area > 0.0)) throw ValidationError(p + ".junction_area", "must be positive");
  if (!(read_current > 0.0)) throw ValidationError(p + ".read_current", "must be positive");
}

double mtj_voltage_from_coverage(double x, const MtjConfig& mtj) {
  detail::require(x >= 0.0 && x <= 1.0, "mtj: coverage must be in [0, 1]");
  // G = (1-x)/R_P + x/R_AP rewritten as (1 + tmr (1-x)) / R_AP, so x = 1
  // gives I R_AP and tmr = 0 gives I R_P without rounding.
  const double r_ap = mtj.r_parallel * (1.0 + mtj.tmr);
  return mtj.read_current * 1e-3 * r_ap / (1.0 + mtj.tmr * (1.0 - x));  // µA Ω = µV -> mV
}

double mtj_coverage(double n_sk, const MtjConfig& mtj, const device::DeviceCalibration& cal) {
  detail::require(n_sk >= 0.0, "mtj: skyrmion count must be non-negative");
  const double d_um = cal.skyrmion_diameter * 1e-3;
  const double area = std::numbers::pi * d_um * d_um / 4.0;
  return std::min(n_sk * area / mtj.junction_area, 1.0);
}

double mtj_activation(std::int64_t n_detec, const MtjConfig& mtj,
                      const device::DeviceCalibration& cal) {
  detail::require(n_detec >= 0, "mtj_activation: n_detec must be non-negative");
  mtj.validate();
  return mtj_voltage_from_coverage(mtj_coverage(static_cast<double>(n_detec), mtj, cal), mtj);
}

double estimate_diameter(double delta_v_per_sk, double delta_v_full_reversal,
                         const transport::DetectionZone& zone) {
  detail::require(delta_v_per_sk >= 0.0 && delta_v_full_reversal > 0.0,
                  "estimate_diameter: voltages must be positive");
  const double ratio = delta_v_per_sk / delta_v_full_reversal;
  if (ratio >= 1.0) throw InvalidRatio("estimate_diameter: per-skyrmion voltage >= full reversal");
  const double area = zone.side * zone.side;  // µm²
  return std::sqrt(4.0 * area * ratio / std::numbers::pi) * 1e3;
}

double full_reversal_voltage(double delta_v_per_sk, double diameter_nm,
                             const transport::DetectionZone& zone) {
  detail::require(delta_v_per_sk > 0.0 && diameter_nm > 0.0,
                  "full_reversal_voltage: inputs must be positive");
  const double d_um = diameter_nm * 1e-3;
  return delta_v_per_sk * zone.side * zone.side / (std::numbers::pi * d_um * d_um / 4.0);
}

void write_trace_csv(std::ostream& os, const MeasurementTrace& trace) {
  os << "index,phase,delta_v_nV,n_detec\n";
  for (const auto& s : trace.samples) {
    os << fmt::format("{},{},{},{}\n", s.index, phase_name(s.phase), s.delta_v, s.n_detec);
  }
}

}  // namespace skysum::readout
