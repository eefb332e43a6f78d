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
#include <optional>
#include <span>
#include <vector>

#include "skysum/kernels.hpp"
#include "skysum/rng.hpp"

namespace skysum::nucleation {

/// Per-pulse fluctuation model around the nominal count.
///
/// With probability `p_bar` a pulse yields one skyrmion fewer or one more than
/// its nominal count. With `split_even` the two directions are equally likely
/// (p(-1) = p(+1) = p_bar/2); otherwise `up_fraction` of the deviations are +1.
struct StochasticModel {
  double p_bar = 0.0;
  bool split_even = true;
  double up_fraction = 0.5;

  void validate() const;
  double p_down() const noexcept;
  double p_up() const noexcept;
};

struct NucleationEvent {
  std::int64_t pulse_index = 0;
  std::int32_t count = 0;
};

/// Integer thresholds encoding (w, model) for the pulse kernels.
/// `w == 0` means the notch is below threshold and nothing nucleates.
kernels::PulseThresholds pulse_thresholds(double w, const StochasticModel& model);

/// Skyrmions created by one pulse of weight `w` (two stream words per pulse).
std::int32_t sample_pulse_count(double w, const StochasticModel& model, Stream& rng);

/// Per-pulse counts for out.size() pulses; identical to calling
/// sample_pulse_count out.size() times on the same stream.
void sample_pulse_counts(double w, const StochasticModel& model, Stream& rng,
                         std::span<std::int32_t> out);

/// Total skyrmions from n pulses; identical to summing sample_pulse_counts.
std::int64_t sample_total(double w, const StochasticModel& model, Stream& rng, std::int64_t n);

/// Relative standard deviation of N_Sk/N_Pulse: sqrt(p_bar / n_pulse).
double analytic_sigma(const StochasticModel& model, std::int64_t n_pulse);

/// Empirical std of (sum of counts)/n_pulse over `trials` independent trials.
/// Trial t draws from Stream(seed, stream_id({t})), so results depend only on
/// (seed, trial index).
double monte_carlo_sigma(const StochasticModel& model, std::int64_t n_pulse, std::int64_t trials,
                         std::uint64_t seed, double w = 1.0);

/// Fraction of events whose count differs from 1 (unit-weight regime).
double estimate_pbar_from_trace(std::span<const NucleationEvent> events);

struct CumulativePoint {
  double n_pulses = 0.0;
  double n_sk = 0.0;
};

struct WeightFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Standard error of the slope; absent for an exact two-point fit.
  std::optional<double> slope_std;
  double r_squared = 1.0;
};

/// Ordinary least squares of n_sk on n_pulses. The slope is the empirical
/// weight dN_Sk/dN_Pulses.
WeightFit fit_weight(std::span<const CumulativePoint> points);

/// Cumulative (n_pulses, n_sk) series starting at (0, 0).
std::vector<CumulativePoint> cumulative(std::span<const std::int32_t> counts);

}  // namespace skysum::nucleation
