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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace skysum::analysis {

struct EnergyModel {
  std::string name;
  double e_per_skyrmion = 20e-12;  ///< J per nucleated skyrmion

  void validate() const;
};

/// thermal_measured 20 pJ, thermal_optimized 10 pJ, vcma 100 fJ, barrier_limit 2 aJ.
EnergyModel energy_preset(std::string_view name);
std::vector<EnergyModel> energy_presets();

struct Precision {
  double value = 1.0;
  /// Set when 1 - sqrt(p/(M N)) fell below 0 and was clamped.
  bool clamped = false;
};

/// 1 - sqrt(p_bar / (m n_pulse)), clamped to [0, 1].
Precision sum_precision(std::int64_t m, std::int64_t n_pulse, double p_bar);

/// m n_pulse e_per_skyrmion.
double sum_energy(std::int64_t m, std::int64_t n_pulse, const EnergyModel& model);

struct ParetoPoint {
  std::int64_t n_pulse = 0;
  double precision = 0.0;
  double energy = 0.0;  ///< J
};

std::vector<ParetoPoint> pareto_curve(std::int64_t m, double p_bar, const EnergyModel& model,
                                      std::span<const std::int64_t> n_pulse_range);

/// Inclusive integer range helper for sweeps.
std::vector<std::int64_t> pulse_range(std::int64_t first, std::int64_t last);

/// Field-step count: floor(span/step) + 1 distinguishable levels.
int synaptic_state_count(double span_mT, double step_mT);

/// Diagnostic variant on the weight axis: floor(range/precision) + 1.
int synaptic_state_count_by_precision(double weight_precision, double weight_range);

/// CSV with header "n_pulse,precision,energy_J,preset".
void write_pareto_csv(std::ostream& os, std::span<const ParetoPoint> points,
                      std::string_view preset, bool header = true);

}  // namespace skysum::analysis
