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
#include <string_view>
#include <vector>

#include "skysum/device_model.hpp"
#include "skysum/nucleation.hpp"
#include "skysum/readout.hpp"
#include "skysum/transport.hpp"

namespace skysum::crossbar {

enum class ReadoutMode { linear_ahe, mtj };

std::string_view readout_mode_name(ReadoutMode m) noexcept;
std::optional<ReadoutMode> parse_readout_mode(std::string_view s) noexcept;

/// M input tracks crossed by L detection columns. Synapse (i, j) has its own
/// notch on track i and detection zone under column j.
struct CrossbarConfig {
  int m_tracks = 2;
  int l_columns = 1;
  /// Row-major m_tracks x l_columns, skyrmions per pulse at the reference
  /// pulse (duration_ref, current_ref).
  std::vector<double> weights{1.0, 1.0};
  std::vector<double> track_resistances{130.0, 120.0};  ///< Ω
  double series_resistance = 12000.0;                    ///< Ω, per electrode
  /// Row-major m_tracks x l_columns; empty selects default_zones().
  std::vector<transport::DetectionZone> zones;
  ReadoutMode readout_mode = ReadoutMode::linear_ahe;
  readout::MtjConfig mtj;
  readout::Delivery delivery = readout::Delivery::direct;
  readout::ReadoutNoise noise;
  /// Spacing of successive columns along a track (kinematic delivery), µm.
  double column_pitch = 7.0;

  double weight(int i, int j) const { return weights[static_cast<std::size_t>(i * l_columns + j)]; }
  /// Zone of synapse (i, j), falling back to the default layout.
  transport::DetectionZone zone(int i, int j, const device::DeviceCalibration& cal) const;
  double notch_x(int j, const device::DeviceCalibration& cal) const;

  /// Throws ValidationError (dimension, sign, resistance-ratio and geometry checks).
  void validate(const device::DeviceCalibration& cal, std::string_view path = "crossbar") const;

  /// Two-track device: unit weights, 130/120 Ω tracks, 12 kΩ series.
  static CrossbarConfig two_track();
};

/// Minimum series/track resistance ratio accepted by validate().
inline constexpr double kMinSeriesRatio = 50.0;

struct InputVector {
  std::vector<device::PulseTrain> pulses_per_track;
};

/// Effective weight of synapse (i, j) for the pulse shape applied to track i.
double effective_weight(const CrossbarConfig& cfg, const InputVector& in,
                        const device::DeviceCalibration& cal, int i, int j);

/// Σ_i w_ij N_i per column: the deterministic expectation without stochastic
/// nucleation, capacity or transport losses.
std::vector<double> expected_sum(const CrossbarConfig& cfg, const InputVector& in,
                                 const device::DeviceCalibration& cal);
double expected_sum(const CrossbarConfig& cfg, const InputVector& in,
                    const device::DeviceCalibration& cal, int column);

struct ColumnResult {
  double expected_sum = 0.0;
  std::int64_t n_detec = 0;
  double output_voltage = 0.0;  ///< nV (linear_ahe) or mV (mtj)
};

/// One stochastic evaluation. Synapse (i, j) draws from
/// stream_id({trial, i, j}); column j measurement noise from
/// stream_id({trial, kColumnNoiseTag, j}).
std::vector<ColumnResult> run_weighted_sum(const CrossbarConfig& cfg, const InputVector& in,
                                           const nucleation::StochasticModel& stochastic,
                                           const device::DeviceCalibration& cal,
                                           std::uint64_t seed, std::uint64_t trial = 0);

inline constexpr std::uint64_t kColumnNoiseTag = 0xC01D0000ull;

/// run_weighted_sum over trials 0..trials-1 in parallel; result[t][j].
std::vector<std::vector<ColumnResult>> run_trials(const CrossbarConfig& cfg,
                                                  const InputVector& in,
                                                  const nucleation::StochasticModel& stochastic,
                                                  const device::DeviceCalibration& cal,
                                                  std::uint64_t seed, std::int64_t trials);

struct CurrentUniformity {
  double max_relative_imbalance = 0.0;
  bool within_budget = true;  ///< imbalance below kCurrentBudget
};

inline constexpr double kCurrentBudget = 1e-3;

/// I_k ∝ 1/(R_k + 2 R_series), normalised to the mean; max |I_k/Ī - 1|.
CurrentUniformity check_current_uniformity(const CrossbarConfig& cfg);

struct Fig4Options {
  int baseline = 20;
  int hold = 20;
  int post = 10;
};

/// Two-track demonstration: baseline, track-1 pulsing, hold, track-2 pulsing,
/// hold, field reset, post. Voltage is the summed Hall signal of column 0.
/// pulses[t].count is the number of pulses applied to track t.
readout::MeasurementTrace run_fig4_protocol(const CrossbarConfig& cfg,
                                            const std::vector<device::PulseTrain>& pulses,
                                            const device::DeviceCalibration& cal,
                                            const nucleation::StochasticModel& stochastic,
                                            std::uint64_t seed, std::uint64_t trial = 0,
                                            const Fig4Options& opt = {});

}  // namespace skysum::crossbar
