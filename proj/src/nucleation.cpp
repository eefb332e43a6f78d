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

#include "skysum/nucleation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "skysum/error.hpp"
#include "skysum/parallel.hpp"

namespace skysum::nucleation {
namespace {

constexpr double kTwo32 = 4294967296.0;

std::uint32_t prob_to_threshold(double p) {
  const double t = std::floor(p * kTwo32);
  if (t <= 0.0) return 0;
  if (t >= kTwo32 - 1.0) return 0xFFFFFFFFu;
  return static_cast<std::uint32_t>(t);
}

constexpr std::size_t kChunkPulses = 4096;

}  // namespace

void StochasticModel::validate() const {
  if (!(p_bar >= 0.0 && p_bar <= 1.0)) {
    throw ValidationError("stochastic.p_bar", "must be in [0, 1]");
  }
  if (!(up_fraction >= 0.0 && up_fraction <= 1.0)) {
    throw ValidationError("stochastic.up_fraction", "must be in [0, 1]");
  }
}

double StochasticModel::p_up() const noexcept {
  return split_even ? p_bar / 2.0 : p_bar * up_fraction;
}

double StochasticModel::p_down() const noexcept {
  return split_even ? p_bar / 2.0 : p_bar * (1.0 - up_fraction);
}

kernels::PulseThresholds pulse_thresholds(double w, const StochasticModel& model) {
  detail::require(w >= 0.0, "sample_pulse_count: weight must be non-negative");
  model.validate();
  kernels::PulseThresholds th;
  if (w == 0.0) return th;  // all-zero thresholds: every pulse yields 0
  const double base = std::floor(w);
  detail::require(base < 2147483647.0, "sample_pulse_count: weight too large");
  th.base = static_cast<std::int32_t>(base);
  th.frac = prob_to_threshold(w - base);
  if (model.split_even) {
    // Equal thresholds keep p(-1) == p(+1) exactly; 2 * 2^31 is the most the
    // disjoint pair can cover.
    const double half = std::min(std::floor(model.p_bar / 2.0 * kTwo32), kTwo32 / 2.0);
    th.down = static_cast<std::uint32_t>(half);
    th.up = static_cast<std::uint32_t>(half);
  } else {
    const double down = std::floor(model.p_down() * kTwo32);
    const double up = std::min(std::floor(model.p_up() * kTwo32), kTwo32 - 1.0 - down);
    th.down = static_cast<std::uint32_t>(std::min(down, kTwo32 - 1.0));
    th.up = static_cast<std::uint32_t>(std::max(0.0, up));
  }
  return th;
}

std::int32_t sample_pulse_count(double w, const StochasticModel& model, Stream& rng) {
  const auto th = pulse_thresholds(w, model);
  std::uint32_t pair[2] = {rng.next_u32(), rng.next_u32()};
  std::int32_t out = 0;
  kernels::table(kernels::Backend::scalar).pulse_counts(pair, 1, th, &out);
  return out;
}

void sample_pulse_counts(double w, const StochasticModel& model, Stream& rng,
                         std::span<std::int32_t> out) {
  const auto th = pulse_thresholds(w, model);
  std::vector<std::uint32_t> words(2 * std::min(out.size(), kChunkPulses));
  for (std::size_t done = 0; done < out.size();) {
    const std::size_t n = std::min(kChunkPulses, out.size() - done);
    std::span<std::uint32_t> buf(words.data(), 2 * n);
    rng.fill_u32(buf);
    kernels::pulse_counts(buf, th, out.subspan(done, n));
    done += n;
  }
}

std::int64_t sample_total(double w, const StochasticModel& model, Stream& rng, std::int64_t n) {
  detail::require(n >= 0, "sample_total: pulse count must be non-negative");
  const auto th = pulse_thresholds(w, model);
  std::vector<std::uint32_t> words(2 * std::min<std::size_t>(n, kChunkPulses));
  std::int64_t total = 0;
  for (std::int64_t done = 0; done < n;) {
    const auto k = static_cast<std::size_t>(std::min<std::int64_t>(kChunkPulses, n - done));
    std::span<std::uint32_t> buf(words.data(), 2 * k);
    rng.fill_u32(buf);
    total += kernels::pulse_count_sum(buf, th);
    done += static_cast<std::int64_t>(k);
  }
  return total;
}

double analytic_sigma(const StochasticModel& model, std::int64_t n_pulse) {
  detail::require(n_pulse >= 1, "analytic_sigma: n_pulse must be >= 1");
  model.validate();
  return std::sqrt(model.p_bar / static_cast<double>(n_pulse));
}

double monte_carlo_sigma(const StochasticModel& model, std::int64_t n_pulse, std::int64_t trials,
                         std::uint64_t seed, double w) {
  detail::require(n_pulse >= 1, "monte_carlo_sigma: n_pulse must be >= 1");
  detail::require(trials >= 2, "monte_carlo_sigma: need at least two trials");
  model.validate();
  std::vector<double> ratio(static_cast<std::size_t>(trials));
  parallel_for(ratio.size(), [&](std::size_t t) {
    Stream rng(seed, stream_id({t}));
    ratio[t] = static_cast<double>(sample_total(w, model, rng, n_pulse)) /
               static_cast<double>(n_pulse);
  });
  // Two-pass variance, reduced in trial order.
  double mean = 0.0;
  for (double r : ratio) mean += r;
  mean /= static_cast<double>(trials);
  double ss = 0.0;
  for (double r : ratio) ss += (r - mean) * (r - mean);
  return std::sqrt(ss / static_cast<double>(trials - 1));
}

double estimate_pbar_from_trace(std::span<const NucleationEvent> events) {
  if (events.empty()) throw InsufficientData("estimate_pbar_from_trace: empty trace");
  const auto deviations =
      std::count_if(events.begin(), events.end(), [](const auto& e) { return e.count != 1; });
  return static_cast<double>(deviations) / static_cast<double>(events.size());
}

WeightFit fit_weight(std::span<const CumulativePoint> points) {
  if (points.size() < 2) throw InsufficientData("fit_weight: need at least two points");
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    mx += p.n_pulses;
    my += p.n_sk;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : points) {
    const double dx = p.n_pulses - mx;
    const double dy = p.n_sk - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw SingularFit("fit_weight: all n_pulses are equal");
  WeightFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (const auto& p : points) {
    const double r = p.n_sk - (fit.intercept + fit.slope * p.n_pulses);
    ssr += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  if (points.size() > 2) fit.slope_std = std::sqrt(ssr / (n - 2.0) / sxx);
  return fit;
}

std::vector<CumulativePoint> cumulative(std::span<const std::int32_t> counts) {
  std::vector<CumulativePoint> out;
  out.reserve(counts.size() + 1);
  out.push_back({0.0, 0.0});
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    total += counts[i];
    out.push_back({static_cast<double>(i + 1), total});
  }
  return out;
}

}  // namespace skysum::nucleation
