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

#include "skysum/calibrate.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "skysum/error.hpp"
#include "skysum/nucleation.hpp"

namespace skysum::calibrate {
namespace {

double to_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw IoError(std::string("calibrate: bad ") + what + " value '" + s + "'");
}

struct Trace {
  std::vector<nucleation::CumulativePoint> points{{0.0, 0.0}};
  std::vector<double> counts;
};

// h_z -> repeat -> trace, ordered for determinism.
std::map<double, std::map<long, Trace>> group(const io::CsvTable& t) {
  const auto ch = t.column("h_z_mT");
  const auto cr = t.column("repeat");
  const auto cp = t.column("pulse_index");
  const auto cc = t.column("count");
  const auto cu = t.column("cumulative");
  std::map<double, std::map<long, Trace>> g;
  for (const auto& row : t.rows) {
    auto& tr = g[to_double(row[ch], "h_z_mT")][static_cast<long>(to_double(row[cr], "repeat"))];
    tr.points.push_back({to_double(row[cp], "pulse_index"), to_double(row[cu], "cumulative")});
    tr.counts.push_back(to_double(row[cc], "count"));
  }
  if (g.empty()) throw InsufficientData("calibrate: traces table is empty");
  return g;
}

std::map<double, double> mean_slopes(const std::map<double, std::map<long, Trace>>& g) {
  std::map<double, double> out;
  for (const auto& [h, reps] : g) {
    double s = 0.0;
    for (const auto& [r, tr] : reps) s += nucleation::fit_weight(tr.points).slope;
    out[h] = s / static_cast<double>(reps.size());
  }
  return out;
}

}  // namespace

FieldLawFit fit_field_law(const io::CsvTable& traces) {
  const auto slopes = mean_slopes(group(traces));
  std::vector<nucleation::CumulativePoint> pts;
  for (const auto& [h, s] : slopes) {
    if (s > 0.0) pts.push_back({h, s});
  }
  if (pts.size() < 2) throw InsufficientData("calibrate: need two fields with nucleation");
  const auto f = nucleation::fit_weight(pts);
  if (!(f.slope < 0.0)) throw DegenerateCalibration("calibrate: weight does not fall with field");
  return {f.slope, -f.intercept / f.slope, f.r_squared, static_cast<int>(pts.size())};
}

std::optional<double> estimate_pbar(const io::CsvTable& traces) {
  const auto g = group(traces);
  const auto slopes = mean_slopes(g);
  double best_h = 0.0, best_d = 0.1;
  bool found = false;
  for (const auto& [h, s] : slopes) {
    if (std::abs(s - 1.0) <= best_d) {
      best_d = std::abs(s - 1.0);
      best_h = h;
      found = true;
    }
  }
  if (!found) return std::nullopt;
  std::vector<nucleation::NucleationEvent> events;
  for (const auto& [r, tr] : g.at(best_h)) {
    for (std::size_t i = 0; i < tr.counts.size(); ++i) {
      events.push_back({static_cast<std::int64_t>(i), static_cast<std::int32_t>(tr.counts[i])});
    }
  }
  return nucleation::estimate_pbar_from_trace(events);
}

double fit_per_skyrmion_voltage(const io::CsvTable& trace) {
  const auto cp = trace.column("phase");
  const auto cv = trace.column("delta_v_nV");
  const auto cn = trace.column("n_detec");
  std::vector<nucleation::CumulativePoint> pts;
  for (const auto& row : trace.rows) {
    if (row[cp] != "pulsing") continue;
    pts.push_back({to_double(row[cn], "n_detec"), to_double(row[cv], "delta_v_nV")});
  }
  if (pts.size() < 2) throw InsufficientData("calibrate: need >= 2 pulsing samples");
  return nucleation::fit_weight(pts).slope;
}

CalibrationResult calibrate(const std::string& preset, const std::filesystem::path& traces_csv,
                            const std::optional<std::filesystem::path>& detection_csv) {
  CalibrationResult res;
  res.calibration = device::preset(preset);
  const auto traces = io::read_csv(traces_csv);
  const auto law = fit_field_law(traces);
  res.calibration.weight_field_slope = law.slope;
  res.calibration.field_max = law.field_max;
  io::Json overrides{{"weight_field_slope", law.slope}, {"field_max", law.field_max}};
  io::Json fit{{"field_law", {{"slope", law.slope}, {"field_max", law.field_max},
                              {"r_squared", law.r_squared}, {"fields_used", law.fields_used}}}};
  if (const auto p = estimate_pbar(traces)) {
    fit["p_bar"] = *p;
  } else {
    fit["p_bar"] = nullptr;
  }
  if (detection_csv) {
    const double v = fit_per_skyrmion_voltage(io::read_csv(*detection_csv));
    res.calibration.per_skyrmion_voltage_mean = v;
    overrides["per_skyrmion_voltage_mean"] = v;
    fit["per_skyrmion_voltage_mean"] = v;
  }
  res.calibration.validate();
  res.document = io::Json{{"calibration", {{"preset", preset}, {"overrides", overrides}}}, {"fit", fit}};
  return res;
}

}  // namespace skysum::calibrate
