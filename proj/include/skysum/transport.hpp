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
#include <vector>

#include "skysum/device_model.hpp"
#include "skysum/kernels.hpp"
#include "skysum/rng.hpp"

namespace skysum::transport {

/// Point skyrmions on one track, stored as parallel arrays so the kinematic
/// kernels can stream over them. Dead entries stay in place until compact().
struct SkyrmionPopulation {
  int track_id = 0;
  std::vector<double> x;   ///< µm along the track
  std::vector<double> y;   ///< µm across the track
  std::vector<double> origin_x;  ///< notch the skyrmion was nucleated at
  std::vector<double> origin_y;
  std::vector<std::uint8_t> alive;
  std::vector<std::uint8_t> pinned;  ///< held at its notch after a reverse erase
  std::vector<std::uint64_t> id;     ///< increasing in creation order
  std::uint64_t next_id = 0;

  std::size_t size() const noexcept { return x.size(); }
  std::size_t alive_count() const noexcept;
  void add(double x0, double y0);
  void clear() noexcept;
  /// Drops dead entries, preserving order.
  void compact();
  /// Throws PreconditionError if any live skyrmion is off the track or ids repeat.
  void check_invariants(const device::DeviceCalibration& cal) const;
};

struct DetectionZone {
  double center_x = 8.0;
  double center_y = 3.0;
  double side = 6.0;
  int capacity = 81;

  kernels::Rect rect() const noexcept;
  void validate(const device::DeviceCalibration& cal, const char* path = "zone") const;
};

/// floor((side / (3 d))^2): skyrmions packed at three-diameter spacing.
int default_capacity(double side_um, double diameter_nm);

/// Zone starting at the notch and spanning the full track width.
DetectionZone default_zone(const device::DeviceCalibration& cal);

struct Displacement {
  double dx = 0.0;  ///< µm
  double dy = 0.0;  ///< µm
};

/// Displacement of one pulse: dx = v(J) t, dy = dx tan(hall angle).
/// A zero duration gives no motion.
Displacement pulse_displacement(const device::DeviceCalibration& cal, double current_density,
                                double duration_ns);

/// Moves every live skyrmion `pulse.count` forward steps, annihilating those
/// that reach the far edge or leave the track. Returns the number annihilated.
std::size_t advance(SkyrmionPopulation& pop, const device::PulseTrain& pulse,
                    const device::DeviceCalibration& cal);

/// Adds `n` skyrmions at a notch.
void nucleate_at(SkyrmionPopulation& pop, double notch_x, double notch_y, std::int64_t n);

/// Retraces skyrmions with reverse pulses. A skyrmion reaching its notch is
/// annihilated with probability 1 - residual_prob, otherwise pinned there.
/// Returns the number annihilated.
std::size_t reverse_erase(SkyrmionPopulation& pop, const device::PulseTrain& pulses,
                          const device::DeviceCalibration& cal, double residual_prob, Stream& rng);

/// Saturating-field reset: removes every skyrmion.
void field_reset(SkyrmionPopulation& pop) noexcept;

/// Live skyrmions whose centre lies in the closed zone rectangle.
std::size_t count_in_zone(const SkyrmionPopulation& pop, const DetectionZone& zone);

/// Pushes the most recently created in-zone skyrmions just past the
/// downstream zone edge until at most `capacity` remain. Returns how many moved.
std::size_t apply_capacity(SkyrmionPopulation& pop, const DetectionZone& zone);

/// Distance past the downstream edge at which displaced skyrmions are placed.
inline constexpr double kDisplacementGap = 1e-6;

/// CSV rows "pulse_index,id,x,y,alive" (no header).
void write_snapshot(std::ostream& os, const SkyrmionPopulation& pop, std::int64_t pulse_index);

}  // namespace skysum::transport
