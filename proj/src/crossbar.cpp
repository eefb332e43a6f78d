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

#include "skysum/crossbar.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "skysum/error.hpp"
#include "skysum/kernels.hpp"
#include "skysum/parallel.hpp"

namespace skysum::crossbar {

std::string_view readout_mode_name(ReadoutMode m) noexcept {
  return m == ReadoutMode::mtj ? "mtj" : "linear_ahe";
}

std::optional<ReadoutMode> parse_readout_mode(std::string_view s) noexcept {
  if (s == "linear_ahe") return ReadoutMode::linear_ahe;
  if (s == "mtj") return ReadoutMode::mtj;
  return std::nullopt;
}

double CrossbarConfig::notch_x(int j, const device::DeviceCalibration& cal) const {
  return cal.notch_x + column_pitch * j;
}

transport::DetectionZone CrossbarConfig::zone(int i, int j,
                                              const device::DeviceCalibration& cal) const {
  if (!zones.empty()) return zones[static_cast<std::size_t>(i * l_columns + j)];
  auto z = transport::default_zone(cal);
  z.center_x += column_pitch * j;
  return z;
}

void CrossbarConfig::validate(const device::DeviceCalibration& cal, std::string_view path) const {
  const std::string p(path);
  if (m_tracks < 1) throw ValidationError(p + ".m_tracks", "must be >= 1");
  if (l_columns < 1) throw ValidationError(p + ".l_columns", "must be >= 1");
  const auto cells = static_cast<std::size_t>(m_tracks) * static_cast<std::size_t>(l_columns);
  if (weights.size() != cells) {
    throw ValidationError(p + ".weights",
                          fmt::format("expected {} x {} entries, got {}", m_tracks, l_columns,
                                      weights.size()));
  }
  for (std::size_t k = 0; k < cells; ++k) {
    if (!(weights[k] >= 0.0)) {
      throw ValidationError(fmt::format("{}.weights[{}]", p, k), "must be non-negative");
    }
  }
  if (track_resistances.size() != static_cast<std::size_t>(m_tracks)) {
    throw ValidationError(p + ".track_resistances", "need one resistance per track");
  }
  double r_max = 0.0;
  for (std::size_t k = 0; k < track_resistances.size(); ++k) {
    if (!(track_resistances[k] > 0.0)) {
      throw ValidationError(fmt::format("{}.track_resistances[{}]", p, k), "must be positive");
    }
    r_max = std::max(r_max, track_resistances[k]);
  }
  if (!(series_resistance >= kMinSeriesRatio * r_max)) {
    throw ValidationError(p + ".series_resistance",
                          fmt::format("must be >= {} x the largest track resistance",
                                      kMinSeriesRatio));
  }
  if (!zones.empty() && zones.size() != cells) {
    throw ValidationError(p + ".zones", "need one zone per (track, column) or none");
  }
  noise.validate(p + ".noise");
  if (readout_mode == ReadoutMode::mtj) mtj.validate(p + ".mtj");
  if (delivery == readout::Delivery::kinematic) {
    if (!(column_pitch > 0.0)) throw ValidationError(p + ".column_pitch", "must be positive");
    for (int i = 0; i < m_tracks; ++i) {
      for (int j = 0; j < l_columns; ++j) {
        zone(i, j, cal).validate(cal, fmt::format("{}.zones[{}]", p, i * l_columns + j).c_str());
      }
      if (notch_x(l_columns - 1, cal) > cal.track_length) {
        throw ValidationError(p + ".column_pitch", "last notch lies beyond the track");
      }
    }
  }
}

CrossbarConfig CrossbarConfig::two_track() { return CrossbarConfig{}; }

namespace {

void check_input(const CrossbarConfig& cfg, const InputVector& in) {
  if (in.pulses_per_track.size() != static_cast<std::size_t>(cfg.m_tracks)) {
    throw DimensionMismatch(fmt::format("input has {} tracks, crossbar has {}",
                                        in.pulses_per_track.size(), cfg.m_tracks));
  }
  for (const auto& p : in.pulses_per_track) {
    p.validate("input");
    if (p.polarity != device::Polarity::forward) {
      throw PreconditionError("crossbar input pulses must be forward polarity");
    }
  }
}

std::vector<double> effective_matrix(const CrossbarConfig& cfg, const InputVector& in,
                                     const device::DeviceCalibration& cal) {
  std::vector<double> w(cfg.weights.size());
  for (int i = 0; i < cfg.m_tracks; ++i) {
    for (int j = 0; j < cfg.l_columns; ++j) {
      w[static_cast<std::size_t>(i * cfg.l_columns + j)] = effective_weight(cfg, in, cal, i, j);
    }
  }
  return w;
}

}  // namespace

double effective_weight(const CrossbarConfig& cfg, const InputVector& in,
                        const device::DeviceCalibration& cal, int i, int j) {
  const auto& p = in.pulses_per_track[static_cast<std::size_t>(i)];
  const double w = cfg.weight(i, j);
  if (w == 0.0) return 0.0;
  return w * device::weight_scale_duration(cal, p.duration) *
         device::weight_scale_current(cal, p.current_density);
}

std::vector<double> expected_sum(const CrossbarConfig& cfg, const InputVector& in,
                                 const device::DeviceCalibration& cal) {
  if (cfg.weights.size() !=
      static_cast<std::size_t>(cfg.m_tracks) * static_cast<std::size_t>(cfg.l_columns)) {
    throw DimensionMismatch("weights do not match m_tracks x l_columns");
  }
  check_input(cfg, in);
  const auto w = effective_matrix(cfg, in, cal);
  std::vector<double> x(static_cast<std::size_t>(cfg.m_tracks));
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = in.pulses_per_track[i].count;
  std::vector<double> out(static_cast<std::size_t>(cfg.l_columns), 0.0);
  kernels::accumulate_rows(w, x, out.size(), out);
  return out;
}

double expected_sum(const CrossbarConfig& cfg, const InputVector& in,
                    const device::DeviceCalibration& cal, int column) {
  detail::require(column >= 0 && column < cfg.l_columns, "expected_sum: column out of range");
  return expected_sum(cfg, in, cal)[static_cast<std::size_t>(column)];
}

namespace {

// Per-synapse skyrmion counts in each zone after all input pulses.
std::vector<std::int64_t> kinematic_counts(const CrossbarConfig& cfg, const InputVector& in,
                                           const std::vector<double>& w_eff,
                                           const nucleation::StochasticModel& stochastic,
                                           const device::DeviceCalibration& cal,
                                           std::uint64_t seed, std::uint64_t trial) {
  const auto m = static_cast<std::size_t>(cfg.m_tracks);
  const auto l = static_cast<std::size_t>(cfg.l_columns);
  std::vector<std::int64_t> n(m * l, 0);
  for (std::size_t i = 0; i < m; ++i) {
    device::PulseTrain one = in.pulses_per_track[i];
    const int pulses = one.count;
    one.count = 1;
    transport::SkyrmionPopulation pop;
    pop.track_id = static_cast<int>(i);
    std::vector<Stream> streams;
    std::vector<transport::DetectionZone> zones;
    for (std::size_t j = 0; j < l; ++j) {
      streams.emplace_back(seed, stream_id({trial, i, j}));
      zones.push_back(cfg.zone(static_cast<int>(i), static_cast<int>(j), cal));
    }
    for (int k = 0; k < pulses; ++k) {
      transport::advance(pop, one, cal);
      for (std::size_t j = 0; j < l; ++j) {
        const auto created = nucleation::sample_pulse_count(w_eff[i * l + j], stochastic, streams[j]);
        transport::nucleate_at(pop, cfg.notch_x(static_cast<int>(j), cal), cal.notch_y(), created);
      }
      for (const auto& z : zones) transport::apply_capacity(pop, z);
      pop.compact();
    }
    for (std::size_t j = 0; j < l; ++j) {
      n[i * l + j] = static_cast<std::int64_t>(transport::count_in_zone(pop, zones[j]));
    }
  }
  return n;
}

std::vector<std::int64_t> direct_counts(const CrossbarConfig& cfg, const InputVector& in,
                                        const std::vector<double>& w_eff,
                                        const nucleation::StochasticModel& stochastic,
                                        std::uint64_t seed, std::uint64_t trial) {
  const auto m = static_cast<std::size_t>(cfg.m_tracks);
  const auto l = static_cast<std::size_t>(cfg.l_columns);
  std::vector<std::int64_t> n(m * l, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < l; ++j) {
      Stream rng(seed, stream_id({trial, i, j}));
      n[i * l + j] =
          nucleation::sample_total(w_eff[i * l + j], stochastic, rng, in.pulses_per_track[i].count);
    }
  }
  return n;
}

}  // namespace

std::vector<ColumnResult> run_weighted_sum(const CrossbarConfig& cfg, const InputVector& in,
                                           const nucleation::StochasticModel& stochastic,
                                           const device::DeviceCalibration& cal,
                                           std::uint64_t seed, std::uint64_t trial) {
  cfg.validate(cal);
  check_input(cfg, in);
  stochastic.validate();
  const auto w_eff = effective_matrix(cfg, in, cal);
  const auto n = cfg.delivery == readout::Delivery::kinematic
                     ? kinematic_counts(cfg, in, w_eff, stochastic, cal, seed, trial)
                     : direct_counts(cfg, in, w_eff, stochastic, seed, trial);
  const auto expected = expected_sum(cfg, in, cal);
  const auto m = static_cast<std::size_t>(cfg.m_tracks);
  const auto l = static_cast<std::size_t>(cfg.l_columns);
  std::vector<ColumnResult> out(l);
  for (std::size_t j = 0; j < l; ++j) {
    auto& r = out[j];
    r.expected_sum = expected[j];
    for (std::size_t i = 0; i < m; ++i) r.n_detec += n[i * l + j];
    if (cfg.readout_mode == ReadoutMode::mtj) {
      r.output_voltage = readout::mtj_activation(r.n_detec, cfg.mtj, cal);
      continue;
    }
    // Sum of the per-track Hall shifts; one measurement-noise draw per column.
    Stream noise_rng(seed, stream_id({trial, kColumnNoiseTag, j}));
    double v = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double z = noise_rng.normal();
      v += readout::hall_voltage(n[i * l + j], cal);
      if (cfg.noise.enabled) {
        v += std::sqrt(static_cast<double>(n[i * l + j])) * cal.per_skyrmion_voltage_std * z;
      }
    }
    const double z_meas = noise_rng.normal();
    if (cfg.noise.enabled) v += cfg.noise.sigma_meas * z_meas;
    r.output_voltage = v;
  }
  return out;
}

std::vector<std::vector<ColumnResult>> run_trials(const CrossbarConfig& cfg,
                                                  const InputVector& in,
                                                  const nucleation::StochasticModel& stochastic,
                                                  const device::DeviceCalibration& cal,
                                                  std::uint64_t seed, std::int64_t trials) {
  detail::require(trials >= 1, "run_trials: need at least one trial");
  cfg.validate(cal);
  std::vector<std::vector<ColumnResult>> out(static_cast<std::size_t>(trials));
  parallel_for(out.size(), [&](std::size_t t) {
    out[t] = run_weighted_sum(cfg, in, stochastic, cal, seed, t);
  });
  return out;
}

CurrentUniformity check_current_uniformity(const CrossbarConfig& cfg) {
  detail::require(!cfg.track_resistances.empty(), "check_current_uniformity: no tracks");
  std::vector<double> current;
  current.reserve(cfg.track_resistances.size());
  for (double r : cfg.track_resistances) {
    detail::require(r + 2.0 * cfg.series_resistance > 0.0,
                    "check_current_uniformity: total resistance must be positive");
    current.push_back(1.0 / (r + 2.0 * cfg.series_resistance));
  }
  double mean = 0.0;
  for (double c : current) mean += c;
  mean /= static_cast<double>(current.size());
  CurrentUniformity u;
  for (double c : current) u.max_relative_imbalance = std::max(u.max_relative_imbalance, std::abs(c / mean - 1.0));
  u.within_budget = u.max_relative_imbalance < kCurrentBudget;
  return u;
}

readout::MeasurementTrace run_fig4_protocol(const CrossbarConfig& cfg,
                                            const std::vector<device::PulseTrain>& pulses,
                                            const device::DeviceCalibration& cal,
                                            const nucleation::StochasticModel& stochastic,
                                            std::uint64_t seed, std::uint64_t trial,
                                            const Fig4Options& opt) {
  if (cfg.m_tracks != 2) {
    throw ProtocolError(fmt::format("two-track protocol needs m_tracks = 2, got {}", cfg.m_tracks));
  }
  detail::require(opt.baseline >= 0 && opt.hold >= 0 && opt.post >= 0,
                  "run_fig4_protocol: phase lengths must be non-negative");
  cfg.validate(cal);
  InputVector in{pulses};
  check_input(cfg, in);
  stochastic.validate();

  const bool kinematic = cfg.delivery == readout::Delivery::kinematic;
  std::array<double, 2> w{effective_weight(cfg, in, cal, 0, 0), effective_weight(cfg, in, cal, 1, 0)};
  std::array<Stream, 2> nuc{Stream(seed, stream_id({trial, 0, 0})),
                            Stream(seed, stream_id({trial, 1, 0}))};
  Stream meas(seed, stream_id({trial, kColumnNoiseTag, 0}));
  std::array<transport::SkyrmionPopulation, 2> pop;
  std::array<std::int64_t, 2> direct{0, 0};
  std::array<transport::DetectionZone, 2> zone{cfg.zone(0, 0, cal), cfg.zone(1, 0, cal)};

  readout::MeasurementTrace trace;
  trace.read_current = cal.read_current;
  std::int64_t index = 0;
  auto count = [&](int t) -> std::int64_t {
    return kinematic ? static_cast<std::int64_t>(transport::count_in_zone(pop[t], zone[t]))
                     : direct[t];
  };
  auto measure = [&](readout::Phase phase) {
    std::int64_t n_total = 0;
    double v = 0.0;
    for (int t = 0; t < 2; ++t) {
      const std::int64_t n = count(t);
      const double z = meas.normal();
      n_total += n;
      v += readout::hall_voltage(n, cal);
      if (cfg.noise.enabled) v += std::sqrt(static_cast<double>(n)) * cal.per_skyrmion_voltage_std * z;
    }
    const double z_meas = meas.normal();
    if (cfg.noise.enabled) v += cfg.noise.sigma_meas * z_meas;
    trace.samples.push_back({index++, phase, v, n_total});
  };
  auto samples = [&](readout::Phase phase, int k) {
    for (int s = 0; s < k; ++s) measure(phase);
  };
  auto pulse_track = [&](int t) {
    device::PulseTrain one = pulses[static_cast<std::size_t>(t)];
    const int total = one.count;
    one.count = 1;
    for (int k = 0; k < total; ++k) {
      const auto created = nucleation::sample_pulse_count(w[t], stochastic, nuc[t]);
      if (kinematic) {
        transport::advance(pop[t], one, cal);
        transport::nucleate_at(pop[t], cfg.notch_x(0, cal), cal.notch_y(), created);
        transport::apply_capacity(pop[t], zone[t]);
        pop[t].compact();
      } else {
        direct[t] += created;
      }
      measure(readout::Phase::pulsing);
    }
  };

  samples(readout::Phase::baseline, opt.baseline);
  pulse_track(0);
  samples(readout::Phase::hold, opt.hold);
  pulse_track(1);
  samples(readout::Phase::hold, opt.hold);
  for (auto& p : pop) transport::field_reset(p);
  direct = {0, 0};
  samples(readout::Phase::post, opt.post);
  return trace;
}

}  // namespace skysum::crossbar
