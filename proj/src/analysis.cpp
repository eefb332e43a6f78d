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

#include "skysum/analysis.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "skysum/error.hpp"

namespace skysum::analysis {

void EnergyModel::validate() const {
  if (!(e_per_skyrmion > 0.0)) throw ValidationError("energy.e_per_skyrmion", "must be positive");
}

std::vector<EnergyModel> energy_presets() {
  return {{"thermal_measured", 20e-12},
          {"thermal_optimized", 10e-12},
          {"vcma", 100e-15},
          {"barrier_limit", 2e-18}};
}

EnergyModel energy_preset(std::string_view name) {
  for (auto& m : energy_presets()) {
    if (m.name == name) return m;
  }
  throw ValidationError("energy.preset", fmt::format("unknown preset '{}'", name));
}

Precision sum_precision(std::int64_t m, std::int64_t n_pulse, double p_bar) {
  detail::require(m >= 1 && n_pulse >= 1, "sum_precision: m and n_pulse must be >= 1");
  detail::require(p_bar >= 0.0 && p_bar <= 1.0, "sum_precision: p_bar must be in [0, 1]");
  const double v = 1.0 - std::sqrt(p_bar / (static_cast<double>(m) * static_cast<double>(n_pulse)));
  if (v < 0.0) return {0.0, true};
  return {v, false};
}

double sum_energy(std::int64_t m, std::int64_t n_pulse, const EnergyModel& model) {
  detail::require(m >= 1 && n_pulse >= 1, "sum_energy: m and n_pulse must be >= 1");
  model.validate();
  return static_cast<double>(m * n_pulse) * model.e_per_skyrmion;
}

std::vector<ParetoPoint> pareto_curve(std::int64_t m, double p_bar, const EnergyModel& model,
                                      std::span<const std::int64_t> n_pulse_range) {
  detail::require(!n_pulse_range.empty(), "pareto_curve: empty pulse range");
  std::vector<ParetoPoint> out;
  out.reserve(n_pulse_range.size());
  for (auto n : n_pulse_range) {
    out.push_back({n, sum_precision(m, n, p_bar).value, sum_energy(m, n, model)});
  }
  return out;
}

std::vector<std::int64_t> pulse_range(std::int64_t first, std::int64_t last) {
  detail::require(first >= 1 && last >= first, "pulse_range: need 1 <= first <= last");
  std::vector<std::int64_t> out;
  for (auto n = first; n <= last; ++n) out.push_back(n);
  return out;
}

namespace {

// Tolerates span/step landing a hair below an integer (2.8/0.2 = 13.999...).
int floor_ratio_plus_one(double num, double den) {
  return static_cast<int>(std::floor(num / den + 1e-9)) + 1;
}

}  // namespace

int synaptic_state_count(double span_mT, double step_mT) {
  detail::require(step_mT > 0.0 && span_mT >= 0.0,
                  "synaptic_state_count: need step > 0 and span >= 0");
  return floor_ratio_plus_one(span_mT, step_mT);
}

int synaptic_state_count_by_precision(double weight_precision, double weight_range) {
  detail::require(weight_precision > 0.0 && weight_range >= 0.0,
                  "synaptic_state_count: need precision > 0 and range >= 0");
  return floor_ratio_plus_one(weight_range, weight_precision);
}

void write_pareto_csv(std::ostream& os, std::span<const ParetoPoint> points,
                      std::string_view preset, bool header) {
  if (header) os << "n_pulse,precision,energy_J,preset\n";
  for (const auto& p : points) {
    os << fmt::format("{},{},{},{}\n", p.n_pulse, p.precision, p.energy, preset);
  }
}

}  // namespace skysum::analysis
