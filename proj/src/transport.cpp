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

#include "skysum/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>

#include "skysum/error.hpp"

namespace skysum::transport {

std::size_t SkyrmionPopulation::alive_count() const noexcept {
  return static_cast<std::size_t>(std::count(alive.begin(), alive.end(), std::uint8_t{1}));
}

void SkyrmionPopulation::add(double x0, double y0) {
  x.push_back(x0);
  y.push_back(y0);
  origin_x.push_back(x0);
  origin_y.push_back(y0);
  alive.push_back(1);
  pinned.push_back(0);
  id.push_back(next_id++);
}

void SkyrmionPopulation::clear() noexcept {
  x.clear();
  y.clear();
  origin_x.clear();
  origin_y.clear();
  alive.clear();
  pinned.clear();
  id.clear();
}

void SkyrmionPopulation::compact() {
  std::size_t w = 0;
  for (std::size_t r = 0; r < size(); ++r) {
    if (!alive[r]) continue;
    x[w] = x[r];
    y[w] = y[r];
    origin_x[w] = origin_x[r];
    origin_y[w] = origin_y[r];
    alive[w] = 1;
    pinned[w] = pinned[r];
    id[w] = id[r];
    ++w;
  }
  x.resize(w);
  y.resize(w);
  origin_x.resize(w);
  origin_y.resize(w);
  alive.resize(w);
  pinned.resize(w);
  id.resize(w);
}

void SkyrmionPopulation::check_invariants(const device::DeviceCalibration& cal) const {
  std::unordered_set<std::uint64_t> seen;
  for (std::size_t i = 0; i < size(); ++i) {
    detail::require(seen.insert(id[i]).second, "population: duplicate skyrmion id");
    if (!alive[i]) continue;
    detail::require(x[i] >= 0.0 && x[i] <= cal.track_length && y[i] >= 0.0 &&
                        y[i] <= cal.track_width,
                    "population: live skyrmion outside the track");
  }
}

kernels::Rect DetectionZone::rect() const noexcept {
  const double h = side / 2.0;
  return {center_x - h, center_x + h, center_y - h, center_y + h};
}

void DetectionZone::validate(const device::DeviceCalibration& cal, const char* path) const {
  const std::string p(path);
  if (!(side > 0.0)) throw ValidationError(p + ".side", "must be positive");
  if (capacity < 1) throw ValidationError(p + ".capacity", "must be >= 1");
  const auto r = rect();
  constexpr double tol = 1e-9;
  if (r.x0 < -tol || r.x1 > cal.track_length + tol || r.y0 < -tol ||
      r.y1 > cal.track_width + tol) {
    throw ValidationError(p, "zone must lie within the track footprint");
  }
}

int default_capacity(double side_um, double diameter_nm) {
  detail::require(side_um > 0.0 && diameter_nm > 0.0, "default_capacity: sizes must be positive");
  const double per_side = side_um / (3.0 * diameter_nm * 1e-3);
  return std::max(1, static_cast<int>(std::floor(per_side * per_side)));
}

DetectionZone default_zone(const device::DeviceCalibration& cal) {
  DetectionZone z;
  z.side = cal.track_width;
  z.center_x = cal.notch_x + z.side / 2.0;
  z.center_y = cal.track_width / 2.0;
  z.capacity = default_capacity(z.side, cal.skyrmion_diameter);
  return z;
}

Displacement pulse_displacement(const device::DeviceCalibration& cal, double current_density,
                                double duration_ns) {
  detail::require(duration_ns >= 0.0, "pulse_displacement: duration must be non-negative");
  if (duration_ns == 0.0) return {};
  const double v = device::velocity_from_current(cal, current_density);  // m/s
  const double dx = v * duration_ns * 1e-3;  // m/s * ns = nm; /1e3 -> µm
  return {dx, dx * std::tan(cal.hall_angle * std::numbers::pi / 180.0)};
}

namespace {

kernels::Rect track_rect(const device::DeviceCalibration& cal) {
  // Reaching the far edge (y >= width) annihilates, so the upper y bound is
  // the largest double below the width.
  return {0.0, cal.track_length, 0.0, std::nextafter(cal.track_width, 0.0)};
}

}  // namespace

std::size_t advance(SkyrmionPopulation& pop, const device::PulseTrain& pulse,
                    const device::DeviceCalibration& cal) {
  detail::require(pulse.polarity == device::Polarity::forward, "advance: pulse must be forward");
  detail::require(pulse.count >= 0, "advance: pulse count must be non-negative");
  if (pulse.count == 0 || pop.size() == 0) return 0;
  const auto d = pulse_displacement(cal, pulse.current_density, pulse.duration);
  std::fill(pop.pinned.begin(), pop.pinned.end(), std::uint8_t{0});
  const auto bounds = track_rect(cal);
  std::size_t lost = 0;
  for (int k = 0; k < pulse.count; ++k) {
    kernels::translate(pop.x, pop.y, d.dx, d.dy);
    lost += kernels::cull_outside(pop.x, pop.y, pop.alive, bounds);
  }
  return lost;
}

void nucleate_at(SkyrmionPopulation& pop, double notch_x, double notch_y, std::int64_t n) {
  detail::require(n >= 0, "nucleate_at: count must be non-negative");
  for (std::int64_t i = 0; i < n; ++i) pop.add(notch_x, notch_y);
}

std::size_t reverse_erase(SkyrmionPopulation& pop, const device::PulseTrain& pulses,
                          const device::DeviceCalibration& cal, double residual_prob,
                          Stream& rng) {
  detail::require(pulses.polarity == device::Polarity::reverse,
                  "reverse_erase: pulses must be reverse polarity");
  detail::require(residual_prob >= 0.0 && residual_prob <= 1.0,
                  "reverse_erase: residual_prob must be in [0, 1]");
  if (pulses.count == 0 || pop.size() == 0) return 0;
  const auto d = pulse_displacement(cal, pulses.current_density, pulses.duration);
  const auto bounds = track_rect(cal);
  constexpr double notch_tol = 1e-9;
  std::size_t erased = 0;
  for (int k = 0; k < pulses.count; ++k) {
    kernels::translate(pop.x, pop.y, -d.dx, -d.dy);
    for (std::size_t i = 0; i < pop.size(); ++i) {
      if (!pop.alive[i]) continue;
      if (pop.pinned[i] || pop.x[i] <= pop.origin_x[i] + notch_tol) {
        const bool newly_arrived = !pop.pinned[i];
        pop.x[i] = pop.origin_x[i];
        pop.y[i] = pop.origin_y[i];
        if (newly_arrived) {
          if (rng.uniform() < residual_prob) {
            pop.pinned[i] = 1;
          } else {
            pop.alive[i] = 0;
            ++erased;
          }
        }
      }
    }
    erased += kernels::cull_outside(pop.x, pop.y, pop.alive, bounds);
  }
  return erased;
}

void field_reset(SkyrmionPopulation& pop) noexcept { pop.clear(); }

std::size_t count_in_zone(const SkyrmionPopulation& pop, const DetectionZone& zone) {
  return kernels::count_in_rect(pop.x, pop.y, pop.alive, zone.rect());
}

std::size_t apply_capacity(SkyrmionPopulation& pop, const DetectionZone& zone) {
  const auto r = zone.rect();
  std::vector<std::size_t> inside;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (pop.alive[i] && pop.x[i] >= r.x0 && pop.x[i] <= r.x1 && pop.y[i] >= r.y0 &&
        pop.y[i] <= r.y1) {
      inside.push_back(i);
    }
  }
  const auto cap = static_cast<std::size_t>(zone.capacity);
  if (inside.size() <= cap) return 0;
  std::sort(inside.begin(), inside.end(),
            [&](std::size_t a, std::size_t b) { return pop.id[a] > pop.id[b]; });
  const std::size_t excess = inside.size() - cap;
  for (std::size_t k = 0; k < excess; ++k) pop.x[inside[k]] = r.x1 + kDisplacementGap;
  return excess;
}

void write_snapshot(std::ostream& os, const SkyrmionPopulation& pop, std::int64_t pulse_index) {
  for (std::size_t i = 0; i < pop.size(); ++i) {
    os << fmt::format("{},{},{},{},{}\n", pulse_index, pop.id[i], pop.x[i], pop.y[i],
                      static_cast<int>(pop.alive[i]));
  }
}

}  // namespace skysum::transport
