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

#include "skysum/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "skysum/analysis.hpp"
#include "skysum/crossbar.hpp"
#include "skysum/error.hpp"
#include "skysum/kernels.hpp"
#include "skysum/netmap.hpp"
#include "skysum/parallel.hpp"
#include "skysum/readout.hpp"

namespace skysum::experiment {

using io::Json;

std::string_view protocol_name(Protocol p) noexcept {
  switch (p) {
    case Protocol::nucleation_sweep:
      return "nucleation_sweep";
    case Protocol::detection_run:
      return "detection_run";
    case Protocol::fig4_twotrack:
      return "fig4_twotrack";
    case Protocol::montecarlo_sigma:
      return "montecarlo_sigma";
    case Protocol::pareto:
      return "pareto";
    case Protocol::netsim:
      return "netsim";
  }
  return "unknown";
}

std::vector<std::string> protocol_names() {
  return {"nucleation_sweep", "detection_run", "fig4_twotrack", "montecarlo_sigma", "pareto", "netsim"};
}

namespace {

Protocol parse_protocol(const std::string& s, const std::string& path) {
  for (auto p : {Protocol::nucleation_sweep, Protocol::detection_run, Protocol::fig4_twotrack,
                 Protocol::montecarlo_sigma, Protocol::pareto, Protocol::netsim}) {
    if (protocol_name(p) == s) return p;
  }
  throw ValidationError(path, fmt::format("unknown protocol '{}'", s));
}

// Reads protocol params and rejects keys nobody asked for.
class Params {
 public:
  Params(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_, "expected object");
  }

  template <class T>
  T get(const char* key, T fallback) {
    used_.insert(key);
    return io::get_or<T>(j_, key, fallback, path_);
  }

  bool has(const char* key) const { return j_.contains(key); }

  const Json* raw(const char* key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <class T>
  std::vector<T> list(const char* key, std::vector<T> fallback) {
    const Json* v = raw(key);
    if (!v) return fallback;
    const std::string p = path_ + "." + key;
    if (!v->is_array()) throw ValidationError(p, "expected array");
    std::vector<T> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      out.push_back(io::value_as<T>((*v)[i], fmt::format("{}[{}]", p, i)));
    }
    return out;
  }

  std::string path(const char* key) const { return path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ValidationError(path_ + "." + it.key(), "unknown parameter");
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void positive(double v, const std::string& path) {
  if (!(v > 0.0)) throw ValidationError(path, "must be positive");
}
void at_least(std::int64_t v, std::int64_t lo, const std::string& path) {
  if (v < lo) throw ValidationError(path, fmt::format("must be >= {}", lo));
}

// ---------------------------------------------------------------- params

struct SweepParams {
  std::string variable = "field";
  std::vector<double> values;
  int pulses = 20;
  int repeats = 100;
  double h_z = 24.0;
  double current_density = 171.0;
  double duration = 50.0;

  const char* value_column() const {
    if (variable == "current") return "current_density_GAm2";
    if (variable == "duration") return "duration_ns";
    return "h_z_mT";
  }
};

SweepParams sweep_params(const Json& j) {
  Params p(j, "spec.params");
  SweepParams s;
  s.variable = p.get<std::string>("variable", s.variable);
  std::vector<double> def;
  if (s.variable == "field") {
    for (int k = 0; k <= 12; ++k) def.push_back(20.0 + 0.5 * k);
  } else if (s.variable == "current") {
    def = {150.0, 160.0, 171.0, 180.0};
  } else if (s.variable == "duration") {
    def = {35.0, 40.0, 45.0, 50.0};
  } else {
    throw ValidationError(p.path("variable"), "must be field, current or duration");
  }
  s.values = p.list<double>("values", def);
  if (s.values.empty()) throw ValidationError(p.path("values"), "must not be empty");
  s.pulses = p.get("pulses", s.pulses);
  s.repeats = p.get("repeats", s.repeats);
  s.h_z = p.get("h_z", s.h_z);
  s.current_density = p.get("current_density", s.current_density);
  s.duration = p.get("duration", s.duration);
  at_least(s.pulses, 1, p.path("pulses"));
  at_least(s.repeats, 1, p.path("repeats"));
  positive(s.current_density, p.path("current_density"));
  positive(s.duration, p.path("duration"));
  p.finish();
  return s;
}

struct DetectionParams {
  int baseline = 10;
  int pulses = 20;
  int post = 10;
  readout::DetectionDevice device;
  bool drift_correct = false;
  int repeats = 1;
};

DetectionParams detection_params(const Json& j, const device::DeviceCalibration& cal,
                                 const nucleation::StochasticModel& stochastic) {
  Params p(j, "spec.params");
  DetectionParams d;
  d.device = readout::DetectionDevice::with_defaults(cal);
  d.device.stochastic = stochastic;
  d.baseline = p.get("baseline", d.baseline);
  d.pulses = p.get("pulses", d.pulses);
  d.post = p.get("post", d.post);
  d.device.field.h_z = p.get("h_z", d.device.field.h_z);
  d.device.pulse.current_density = p.get("current_density", d.device.pulse.current_density);
  d.device.pulse.duration = p.get("duration", d.device.pulse.duration);
  if (p.has("weight")) d.device.weight_override = p.get("weight", 0.0);
  const auto delivery = p.get<std::string>("delivery", "kinematic");
  const auto parsed = readout::parse_delivery(delivery);
  if (!parsed) throw ValidationError(p.path("delivery"), "must be kinematic or direct");
  d.device.delivery = *parsed;
  if (const Json* z = p.raw("zone")) d.device.zone = io::zone_from_json(*z, p.path("zone"), d.device.zone);
  if (const Json* n = p.raw("noise")) d.device.noise = io::noise_from_json(*n, p.path("noise"), d.device.noise);
  if (const Json* dr = p.raw("drift")) {
    d.device.drift.offset = io::get_or(*dr, "offset", 0.0, p.path("drift"));
    d.device.drift.slope = io::get_or(*dr, "slope", 0.0, p.path("drift"));
  }
  d.drift_correct = p.get("drift_correct", d.drift_correct);
  d.repeats = p.get("repeats", d.repeats);
  at_least(d.baseline, 0, p.path("baseline"));
  at_least(d.pulses, 0, p.path("pulses"));
  at_least(d.post, 0, p.path("post"));
  at_least(d.repeats, 1, p.path("repeats"));
  if (d.device.weight_override && *d.device.weight_override < 0.0) {
    throw ValidationError(p.path("weight"), "must be non-negative");
  }
  d.device.pulse.validate("spec.params");
  if (d.device.delivery == readout::Delivery::kinematic) d.device.zone.validate(cal, "spec.params.zone");
  p.finish();
  return d;
}

struct Fig4Params {
  crossbar::CrossbarConfig cfg = crossbar::CrossbarConfig::two_track();
  std::vector<device::PulseTrain> pulses;
  crossbar::Fig4Options opt;
  int repeats = 1;
};

Fig4Params fig4_params(const Json& j, const device::DeviceCalibration& cal) {
  Params p(j, "spec.params");
  Fig4Params f;
  const auto counts = p.list<int>("pulses", {20, 20});
  const auto durations = p.list<double>("durations", {cal.duration_ref, cal.duration_ref});
  const double jd = p.get("current_density", cal.current_ref);
  f.cfg.weights = p.list<double>("weights", {1.0, 1.0});
  f.cfg.track_resistances = p.list<double>("track_resistances", f.cfg.track_resistances);
  f.cfg.series_resistance = p.get("series_resistance", f.cfg.series_resistance);
  f.cfg.noise.enabled = true;
  if (const Json* n = p.raw("noise")) f.cfg.noise = io::noise_from_json(*n, p.path("noise"), f.cfg.noise);
  const auto delivery = readout::parse_delivery(p.get<std::string>("delivery", "direct"));
  if (!delivery) throw ValidationError(p.path("delivery"), "must be kinematic or direct");
  f.cfg.delivery = *delivery;
  f.opt.baseline = p.get("baseline", f.opt.baseline);
  f.opt.hold = p.get("hold", f.opt.hold);
  f.opt.post = p.get("post", f.opt.post);
  f.repeats = p.get("repeats", f.repeats);
  if (counts.size() != 2) throw ValidationError(p.path("pulses"), "need two entries");
  if (durations.size() != 2) throw ValidationError(p.path("durations"), "need two entries");
  if (f.cfg.weights.size() != 2) throw ValidationError(p.path("weights"), "need two entries");
  for (int t = 0; t < 2; ++t) {
    f.pulses.push_back({counts[static_cast<std::size_t>(t)], jd, durations[static_cast<std::size_t>(t)],
                        device::Polarity::forward});
    f.pulses.back().validate(fmt::format("spec.params.track[{}]", t));
  }
  at_least(f.opt.baseline, 0, p.path("baseline"));
  at_least(f.opt.hold, 0, p.path("hold"));
  at_least(f.opt.post, 0, p.path("post"));
  at_least(f.repeats, 1, p.path("repeats"));
  f.cfg.validate(cal, "spec.params");
  p.finish();
  return f;
}

struct MonteCarloParams {
  std::vector<double> p1_values{0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<std::int64_t> n_pulses{1, 2, 5, 10, 20, 50, 100, 200, 500, 1000};
  std::int64_t trials = 10000;
  double weight = 1.0;
};

MonteCarloParams montecarlo_params(const Json& j) {
  Params p(j, "spec.params");
  MonteCarloParams m;
  m.p1_values = p.list<double>("p1_values", m.p1_values);
  m.n_pulses = p.list<std::int64_t>("n_pulses", m.n_pulses);
  m.trials = p.get("trials", m.trials);
  m.weight = p.get("weight", m.weight);
  for (std::size_t i = 0; i < m.p1_values.size(); ++i) {
    if (!(m.p1_values[i] >= 0.0 && m.p1_values[i] <= 1.0)) {
      throw ValidationError(fmt::format("spec.params.p1_values[{}]", i), "must be in [0, 1]");
    }
  }
  for (std::size_t i = 0; i < m.n_pulses.size(); ++i) {
    at_least(m.n_pulses[i], 1, fmt::format("spec.params.n_pulses[{}]", i));
  }
  at_least(m.trials, 2, p.path("trials"));
  if (!(m.weight >= 0.0)) throw ValidationError(p.path("weight"), "must be non-negative");
  p.finish();
  return m;
}

struct ParetoParams {
  std::int64_t m = 10;
  double p_bar = 0.4;
  std::int64_t n_min = 1;
  std::int64_t n_max = 100;
  std::vector<std::string> presets;
};

ParetoParams pareto_params(const Json& j, const nucleation::StochasticModel& stochastic) {
  Params p(j, "spec.params");
  ParetoParams r;
  r.p_bar = stochastic.p_bar;
  r.m = p.get("m", r.m);
  r.p_bar = p.get("p_bar", r.p_bar);
  r.n_min = p.get("n_min", r.n_min);
  r.n_max = p.get("n_max", r.n_max);
  std::vector<std::string> all;
  for (const auto& e : analysis::energy_presets()) all.push_back(e.name);
  r.presets = p.list<std::string>("presets", all);
  at_least(r.m, 1, p.path("m"));
  at_least(r.n_min, 1, p.path("n_min"));
  at_least(r.n_max, r.n_min, p.path("n_max"));
  if (!(r.p_bar >= 0.0 && r.p_bar <= 1.0)) throw ValidationError(p.path("p_bar"), "must be in [0, 1]");
  for (std::size_t i = 0; i < r.presets.size(); ++i) {
    try {
      analysis::energy_preset(r.presets[i]);
    } catch (const ValidationError&) {
      throw ValidationError(fmt::format("spec.params.presets[{}]", i), "unknown energy preset");
    }
  }
  p.finish();
  return r;
}

struct NetsimParams {
  netmap::Matrix weights;
  int states = 15;
  std::vector<std::vector<std::int64_t>> inputs;
  crossbar::ReadoutMode readout = crossbar::ReadoutMode::linear_ahe;
  readout::MtjConfig mtj;
  std::int64_t trials = 1000;
};

NetsimParams netsim_params(const Json& j, const std::filesystem::path& base_dir) {
  Params p(j, "spec.params");
  NetsimParams n;
  const Json* inline_w = p.raw("weights");
  const auto file = p.get<std::string>("weights_file", "");
  if (inline_w && !file.empty()) {
    throw ValidationError(p.path("weights"), "give either weights or weights_file, not both");
  }
  if (inline_w) {
    if (!inline_w->is_array() || inline_w->empty()) {
      throw ValidationError(p.path("weights"), "expected a non-empty array of rows");
    }
    n.weights.rows = static_cast<int>(inline_w->size());
    for (std::size_t i = 0; i < inline_w->size(); ++i) {
      const auto& row = (*inline_w)[i];
      const std::string rp = fmt::format("spec.params.weights[{}]", i);
      if (!row.is_array()) throw ValidationError(rp, "expected array");
      if (i == 0) n.weights.cols = static_cast<int>(row.size());
      if (row.size() != static_cast<std::size_t>(n.weights.cols) || row.empty()) {
        throw ValidationError(rp, "rows must be non-empty and of equal length");
      }
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (!row[k].is_number()) throw ValidationError(fmt::format("{}[{}]", rp, k), "expected number");
        n.weights.data.push_back(row[k].get<double>());
      }
    }
  } else if (!file.empty()) {
    std::filesystem::path f = file;
    if (f.is_relative()) f = base_dir / f;
    std::ifstream in(f);
    if (!in) throw ValidationError(p.path("weights_file"), "cannot open " + f.string());
    n.weights = netmap::read_matrix_csv(in);
  } else {
    throw ValidationError(p.path("weights"), "required (or weights_file)");
  }
  n.states = p.get("states", n.states);
  at_least(n.states, 2, p.path("states"));
  const Json* in = p.raw("inputs");
  if (!in || !in->is_array() || in->empty()) {
    throw ValidationError(p.path("inputs"), "expected a non-empty array of pulse-count vectors");
  }
  for (std::size_t s = 0; s < in->size(); ++s) {
    const auto& v = (*in)[s];
    const std::string sp = fmt::format("spec.params.inputs[{}]", s);
    if (!v.is_array() || v.size() != static_cast<std::size_t>(n.weights.rows)) {
      throw ValidationError(sp, fmt::format("expected {} pulse counts", n.weights.rows));
    }
    std::vector<std::int64_t> x;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!v[k].is_number_integer() || v[k].get<std::int64_t>() < 0) {
        throw ValidationError(fmt::format("{}[{}]", sp, k), "expected a non-negative integer");
      }
      x.push_back(v[k].get<std::int64_t>());
    }
    n.inputs.push_back(std::move(x));
  }
  const auto mode = crossbar::parse_readout_mode(p.get<std::string>("readout", "linear_ahe"));
  if (!mode) throw ValidationError(p.path("readout"), "must be linear_ahe or mtj");
  n.readout = *mode;
  if (const Json* m = p.raw("mtj")) {
    const std::string mp = p.path("mtj");
    n.mtj.r_parallel = io::get_or(*m, "r_parallel", n.mtj.r_parallel, mp);
    n.mtj.tmr = io::get_or(*m, "tmr", n.mtj.tmr, mp);
    n.mtj.junction_area = io::get_or(*m, "junction_area", n.mtj.junction_area, mp);
    n.mtj.read_current = io::get_or(*m, "read_current", n.mtj.read_current, mp);
    n.mtj.validate(mp);
  }
  n.trials = p.get("trials", n.trials);
  at_least(n.trials, 1, p.path("trials"));
  p.finish();
  return n;
}

// ---------------------------------------------------------------- output

class RunWriter {
 public:
  explicit RunWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void text(const std::string& name, std::string_view content) {
    io::write_text(dir_ / name, content);
    files_.push_back(name);
  }
  void json(const std::string& name, const Json& j) { text(name, j.dump(2) + "\n"); }
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
};

Line ols(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<nucleation::CumulativePoint> pts;
  for (std::size_t i = 0; i < x.size(); ++i) pts.push_back({x[i], y[i]});
  const auto f = nucleation::fit_weight(pts);
  return {f.slope, f.intercept, f.r_squared};
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// ---------------------------------------------------------------- protocols

Json run_nucleation_sweep(const ExperimentSpec& spec, const device::DeviceCalibration& cal,
                          RunWriter& out) {
  const auto s = sweep_params(spec.params);
  const std::size_t nv = s.values.size();
  const auto reps = static_cast<std::size_t>(s.repeats);
  const auto np = static_cast<std::size_t>(s.pulses);

  std::vector<double> weights(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    device::FieldSetting field{s.h_z};
    device::PulseTrain pulse{s.pulses, s.current_density, s.duration, device::Polarity::forward};
    if (s.variable == "field") field.h_z = s.values[v];
    if (s.variable == "current") pulse.current_density = s.values[v];
    if (s.variable == "duration") pulse.duration = s.values[v];
    pulse.validate("spec.params");
    weights[v] = device::synaptic_weight(cal, field, pulse);
  }

  std::vector<std::int32_t> counts(nv * reps * np);
  std::vector<nucleation::WeightFit> fits(nv * reps);
  parallel_for(nv * reps, [&](std::size_t k) {
    const std::size_t v = k / reps, r = k % reps;
    Stream rng(spec.seed, stream_id({v, r}));
    std::span<std::int32_t> c(counts.data() + k * np, np);
    nucleation::sample_pulse_counts(weights[v], spec.stochastic, rng, c);
    fits[k] = nucleation::fit_weight(nucleation::cumulative(c));
  });

  const char* col = s.value_column();
  std::string traces = fmt::format("{},repeat,pulse_index,count,cumulative\n", col);
  std::string curves = fmt::format("{},pulse_index,mean_cumulative,std_cumulative\n", col);
  std::string slopes = fmt::format("{},weight,slope_mean,slope_std,r_squared_mean\n", col);
  std::vector<double> slope_means(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    const auto val = io::num(s.values[v]);
    std::vector<std::vector<double>> cum(np + 1, std::vector<double>(reps, 0.0));
    for (std::size_t r = 0; r < reps; ++r) {
      std::int64_t total = 0;
      for (std::size_t i = 0; i < np; ++i) {
        const auto c = counts[(v * reps + r) * np + i];
        total += c;
        cum[i + 1][r] = static_cast<double>(total);
        fmt::format_to(std::back_inserter(traces), "{},{},{},{},{}\n", val, r, i + 1, c, total);
      }
    }
    for (std::size_t i = 0; i <= np; ++i) {
      fmt::format_to(std::back_inserter(curves), "{},{},{},{}\n", val, i, mean_of(cum[i]),
                     std_of(cum[i]));
    }
    std::vector<double> sl, r2;
    for (std::size_t r = 0; r < reps; ++r) {
      sl.push_back(fits[v * reps + r].slope);
      r2.push_back(fits[v * reps + r].r_squared);
    }
    slope_means[v] = mean_of(sl);
    fmt::format_to(std::back_inserter(slopes), "{},{},{},{},{}\n", val, weights[v], slope_means[v],
                   std_of(sl), mean_of(r2));
  }
  out.text("traces.csv", traces);
  out.text("curves.csv", curves);
  out.text("slopes.csv", slopes);

  Json summary{{"variable", s.variable}, {"value_column", col}, {"pulses", s.pulses},
               {"repeats", s.repeats}};
  Json per = Json::array();
  for (std::size_t v = 0; v < nv; ++v) {
    per.push_back({{"value", s.values[v]}, {"weight", weights[v]}, {"slope_mean", slope_means[v]}});
  }
  summary["slopes"] = per;
  if (nv >= 2 && s.values.front() != s.values.back()) {
    const auto line = ols(s.values, slope_means);
    summary["regression"] = {{"slope", line.slope}, {"intercept", line.intercept},
                             {"r_squared", line.r_squared}};
  }
  return summary;
}

Json run_detection(const ExperimentSpec& spec, const device::DeviceCalibration& cal,
                   RunWriter& out) {
  const auto d = detection_params(spec.params, cal, spec.stochastic);
  const auto protocol = readout::ProtocolSpec::detection(d.baseline, d.pulses, d.post);
  std::vector<readout::MeasurementTrace> traces(static_cast<std::size_t>(d.repeats));
  parallel_for(traces.size(), [&](std::size_t r) {
    Stream rng(spec.seed, stream_id({r}));
    traces[r] = readout::measure_protocol(d.device, protocol, rng);
  });
  std::ostringstream csv;
  readout::write_trace_csv(csv, traces[0]);
  out.text("trace.csv", csv.str());

  auto last_of = [](const readout::MeasurementTrace& t, readout::Phase ph) -> const readout::Sample* {
    const readout::Sample* s = nullptr;
    for (const auto& x : t.samples) {
      if (x.phase == ph) s = &x;
    }
    return s;
  };
  Json summary{{"weight", d.device.weight()},
               {"delivery", readout::delivery_name(d.device.delivery)},
               {"zone", io::to_json(d.device.zone)},
               {"noise", io::to_json(d.device.noise)}};
  if (const auto* s = last_of(traces[0], readout::Phase::pulsing)) {
    summary["final_pulsing"] = {{"delta_v_nV", s->delta_v}, {"n_detec", s->n_detec}};
  }
  if (d.drift_correct) {
    const auto fit = readout::fit_drift(traces[0]);
    std::ostringstream c2;
    readout::write_trace_csv(c2, readout::drift_correct(traces[0]));
    out.text("trace_corrected.csv", c2.str());
    summary["drift_fit"] = {{"intercept", fit.intercept}, {"slope", fit.slope}};
  }
  if (d.repeats > 1) {
    const double bound = 3.0 * d.device.noise.sigma_meas;
    std::string rows = "repeat,final_pulsing_delta_v_nV,final_post_delta_v_nV\n";
    std::int64_t within = 0, with_post = 0;
    for (std::size_t r = 0; r < traces.size(); ++r) {
      const auto* p = last_of(traces[r], readout::Phase::pulsing);
      const auto* q = last_of(traces[r], readout::Phase::post);
      fmt::format_to(std::back_inserter(rows), "{},{},{}\n", r, p ? io::num(p->delta_v) : "",
                     q ? io::num(q->delta_v) : "");
      if (q) {
        ++with_post;
        within += std::abs(q->delta_v) <= bound;
      }
    }
    out.text("repeats.csv", rows);
    if (with_post > 0) {
      summary["post_within_3sigma_fraction"] =
          static_cast<double>(within) / static_cast<double>(with_post);
    }
  }
  summary["diameter_estimate_nm"] = readout::estimate_diameter(
      cal.per_skyrmion_voltage_mean, cal.full_reversal_voltage, d.device.zone);
  return summary;
}

struct Plateaus {
  double first = 0.0;
  double second = 0.0;
};

// Means of the two hold phases.
Plateaus plateaus(const readout::MeasurementTrace& t) {
  std::vector<double> a, b;
  bool seen_second_pulsing = false, in_first_hold = false;
  for (const auto& s : t.samples) {
    if (s.phase == readout::Phase::hold) {
      (seen_second_pulsing ? b : a).push_back(s.delta_v);
      in_first_hold = true;
    } else if (s.phase == readout::Phase::pulsing && in_first_hold) {
      seen_second_pulsing = true;
    }
  }
  return {mean_of(a), mean_of(b)};
}

Json run_fig4(const ExperimentSpec& spec, const device::DeviceCalibration& cal, RunWriter& out) {
  const auto f = fig4_params(spec.params, cal);
  std::vector<Plateaus> pl(static_cast<std::size_t>(f.repeats));
  readout::MeasurementTrace first;
  parallel_for(pl.size(), [&](std::size_t r) {
    auto t = crossbar::run_fig4_protocol(f.cfg, f.pulses, cal, spec.stochastic, spec.seed, r, f.opt);
    pl[r] = plateaus(t);
    if (r == 0) first = std::move(t);
  });
  std::ostringstream csv;
  readout::write_trace_csv(csv, first);
  out.text("trace.csv", csv.str());
  std::string rows = "repeat,plateau1_nV,plateau2_nV\n";
  std::vector<double> p1, p2;
  for (std::size_t r = 0; r < pl.size(); ++r) {
    fmt::format_to(std::back_inserter(rows), "{},{},{}\n", r, pl[r].first, pl[r].second);
    p1.push_back(pl[r].first);
    p2.push_back(pl[r].second);
  }
  out.text("plateaus.csv", rows);
  crossbar::InputVector in{f.pulses};
  const auto u = crossbar::check_current_uniformity(f.cfg);
  const double m1 = mean_of(p1), m2 = mean_of(p2);
  Json summary{{"effective_weights",
                {crossbar::effective_weight(f.cfg, in, cal, 0, 0),
                 crossbar::effective_weight(f.cfg, in, cal, 1, 0)}},
               {"expected_sum", crossbar::expected_sum(f.cfg, in, cal, 0)},
               {"plateau1_mean_nV", m1},
               {"plateau1_std_nV", std_of(p1)},
               {"plateau2_mean_nV", m2},
               {"plateau2_std_nV", std_of(p2)},
               {"current_imbalance", u.max_relative_imbalance},
               {"current_within_budget", u.within_budget}};
  if (m1 != 0.0) summary["plateau_ratio"] = m2 / m1;
  return summary;
}

Json run_montecarlo(const ExperimentSpec& spec, RunWriter& out) {
  const auto m = montecarlo_params(spec.params);
  std::string rows = "p1,p_bar,n_pulse,sigma_mc,sigma_analytic\n";
  double worst = 0.0;
  for (double p1 : m.p1_values) {
    nucleation::StochasticModel model = spec.stochastic;
    model.p_bar = 1.0 - p1;
    for (auto n : m.n_pulses) {
      const double mc = nucleation::monte_carlo_sigma(model, n, m.trials, spec.seed, m.weight);
      const double an = nucleation::analytic_sigma(model, n);
      if (an > 0.0) worst = std::max(worst, std::abs(mc / an - 1.0));
      fmt::format_to(std::back_inserter(rows), "{},{},{},{},{}\n", p1, model.p_bar, n, mc, an);
    }
  }
  out.text("sigma.csv", rows);
  return Json{{"trials", m.trials}, {"weight", m.weight}, {"max_relative_deviation", worst}};
}

Json run_pareto(const ExperimentSpec& spec, RunWriter& out) {
  const auto p = pareto_params(spec.params, spec.stochastic);
  const auto range = analysis::pulse_range(p.n_min, p.n_max);
  std::ostringstream csv;
  Json per = Json::object();
  bool header = true;
  for (const auto& name : p.presets) {
    const auto model = analysis::energy_preset(name);
    const auto curve = analysis::pareto_curve(p.m, p.p_bar, model, range);
    analysis::write_pareto_csv(csv, curve, name, header);
    header = false;
    per[name] = {{"e_per_skyrmion_J", model.e_per_skyrmion},
                 {"first", {{"n_pulse", curve.front().n_pulse}, {"precision", curve.front().precision},
                            {"energy_J", curve.front().energy}}},
                 {"last", {{"n_pulse", curve.back().n_pulse}, {"precision", curve.back().precision},
                           {"energy_J", curve.back().energy}}}};
  }
  out.text("pareto.csv", csv.str());
  return Json{{"m", p.m}, {"p_bar", p.p_bar}, {"presets", per}};
}

Json run_netsim(const ExperimentSpec& spec, const device::DeviceCalibration& cal, RunWriter& out) {
  const auto n = netsim_params(spec.params, spec.base_dir);
  const auto layer = netmap::quantize(n.weights, n.states, cal);

  Json sched = Json::array();
  for (const auto& s : netmap::programming_schedule(layer, cal)) {
    sched.push_back({{"row", s.row}, {"col", s.col}, {"polarity", s.positive ? "pos" : "neg"},
                     {"level", s.level}, {"weight", s.weight}, {"h_z_mT", s.h_z}});
  }
  out.json("schedule.json", Json{{"states", n.states}, {"w_max", layer.w_max},
                                  {"spacing", layer.spacing()},
                                  {"device_quantum", layer.device_quantum()}, {"sites", sched}});

  netmap::InferOptions opt;
  opt.readout = n.readout;
  opt.mtj = n.mtj;
  opt.stochastic = spec.stochastic;
  opt.seed = spec.seed;
  std::string rows = "sample,column,expected,stochastic_mean,stochastic_std\n";
  double worst = 0.0;
  for (std::size_t s = 0; s < n.inputs.size(); ++s) {
    opt.mode = netmap::InferMode::expected;
    const auto expected = netmap::infer(layer, n.inputs[s], cal, opt);
    std::vector<std::vector<double>> draws(static_cast<std::size_t>(n.trials));
    parallel_for(draws.size(), [&](std::size_t t) {
      auto o = opt;
      o.mode = netmap::InferMode::stochastic;
      o.trial = s * static_cast<std::uint64_t>(n.trials) + t;
      draws[t] = netmap::infer(layer, n.inputs[s], cal, o);
    });
    for (std::size_t j = 0; j < expected.size(); ++j) {
      std::vector<double> col;
      for (const auto& d : draws) col.push_back(d[j]);
      const double mean = mean_of(col);
      if (expected[j] != 0.0) worst = std::max(worst, std::abs(mean / expected[j] - 1.0));
      fmt::format_to(std::back_inserter(rows), "{},{},{},{},{}\n", s, j, expected[j], mean,
                     std_of(col));
    }
  }
  out.text("outputs.csv", rows);
  return Json{{"rows", layer.rows()}, {"cols", layer.cols()}, {"states", n.states},
              {"readout", crossbar::readout_mode_name(n.readout)}, {"trials", n.trials},
              {"max_relative_mean_error", worst}};
}

}  // namespace

device::DeviceCalibration ExperimentSpec::calibration() const {
  Json j{{"preset", preset}, {"overrides", calibration_overrides}};
  return io::calibration_from_json(j, "spec.calibration");
}

void ExperimentSpec::validate() const {
  if (name.empty()) throw ValidationError("spec.name", "must be non-empty");
  if (output_dir.empty()) throw ValidationError("spec.output_dir", "must be set");
  const auto cal = calibration();
  stochastic.validate();
  switch (protocol) {
    case Protocol::nucleation_sweep:
      sweep_params(params);
      break;
    case Protocol::detection_run:
      detection_params(params, cal, stochastic);
      break;
    case Protocol::fig4_twotrack:
      fig4_params(params, cal);
      break;
    case Protocol::montecarlo_sigma:
      montecarlo_params(params);
      break;
    case Protocol::pareto:
      pareto_params(params, stochastic);
      break;
    case Protocol::netsim:
      netsim_params(params, base_dir);
      break;
  }
}

ExperimentSpec parse_spec(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ValidationError("spec", "expected object");
  static const std::set<std::string> known{"name", "protocol", "seed", "output_dir",
                                           "calibration", "stochastic", "params"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw ValidationError("spec." + it.key(), "unknown key");
  }
  ExperimentSpec s;
  s.base_dir = base_dir;
  s.name = io::get_or<std::string>(j, "name", "", "spec");
  if (!j.contains("protocol")) throw ValidationError("spec.protocol", "required");
  s.protocol = parse_protocol(io::get_or<std::string>(j, "protocol", "", "spec"), "spec.protocol");
  s.seed = io::get_or<std::uint64_t>(j, "seed", 0, "spec");
  s.output_dir = io::get_or<std::string>(j, "output_dir", "runs/" + s.name, "spec");
  if (auto it = j.find("calibration"); it != j.end()) {
    if (!it->is_object()) throw ValidationError("spec.calibration", "expected object");
    io::calibration_from_json(*it, "spec.calibration");  // validates
    s.preset = io::get_or<std::string>(*it, "preset", s.preset, "spec.calibration");
    if (auto o = it->find("overrides"); o != it->end()) s.calibration_overrides = *o;
  }
  if (auto it = j.find("stochastic"); it != j.end()) {
    s.stochastic = io::stochastic_from_json(*it, "spec.stochastic");
  }
  if (auto it = j.find("params"); it != j.end()) {
    if (!it->is_object()) throw ValidationError("spec.params", "expected object");
    s.params = *it;
  }
  s.validate();
  return s;
}

ExperimentSpec load_spec(const std::filesystem::path& file) {
  return parse_spec(io::read_json(file), file.parent_path());
}

Json spec_to_json(const ExperimentSpec& spec) {
  Json params = spec.params;
  // Pin a relative weights file to an absolute path so the snapshot stands alone.
  if (params.contains("weights_file") && params["weights_file"].is_string()) {
    std::filesystem::path f = params["weights_file"].get<std::string>();
    if (f.is_relative()) {
      params["weights_file"] = std::filesystem::absolute(spec.base_dir / f).lexically_normal().string();
    }
  }
  return Json{{"name", spec.name},
              {"protocol", protocol_name(spec.protocol)},
              {"seed", spec.seed},
              {"output_dir", spec.output_dir.string()},
              {"calibration", {{"preset", spec.preset}, {"overrides", io::to_json(spec.calibration())}}},
              {"stochastic", io::to_json(spec.stochastic)},
              {"params", params}};
}

std::filesystem::path run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const auto cal = spec.calibration();
  RunWriter out(spec.output_dir);
  out.json("config.json", spec_to_json(spec));
  Json summary;
  switch (spec.protocol) {
    case Protocol::nucleation_sweep:
      summary = run_nucleation_sweep(spec, cal, out);
      break;
    case Protocol::detection_run:
      summary = run_detection(spec, cal, out);
      break;
    case Protocol::fig4_twotrack:
      summary = run_fig4(spec, cal, out);
      break;
    case Protocol::montecarlo_sigma:
      summary = run_montecarlo(spec, out);
      break;
    case Protocol::pareto:
      summary = run_pareto(spec, out);
      break;
    case Protocol::netsim:
      summary = run_netsim(spec, cal, out);
      break;
  }
  Json full{{"name", spec.name}, {"protocol", protocol_name(spec.protocol)}, {"seed", spec.seed}};
  for (auto it = summary.begin(); it != summary.end(); ++it) full[it.key()] = it.value();
  out.json("summary.json", full);
  auto files = out.files();
  files.push_back("manifest.json");
  io::write_json(spec.output_dir / "manifest.json",
                 Json{{"name", spec.name},
                      {"protocol", protocol_name(spec.protocol)},
                      {"seed", spec.seed},
                      {"skysum_version", kVersion},
                      {"kernels", kernels::backend_name(kernels::active_backend())},
                      {"files", files}});
  return spec.output_dir;
}

namespace {

void set_dotted(Json& j, const std::string& dotted, const Json& value) {
  Json* cur = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ValidationError("grid." + dotted, "empty path segment");
    if (dot == std::string::npos) {
      (*cur)[key] = value;
      return;
    }
    if (!cur->contains(key)) (*cur)[key] = Json::object();
    cur = &(*cur)[key];
    if (!cur->is_object()) throw ValidationError("grid." + dotted, "path crosses a non-object");
    start = dot + 1;
  }
}

std::string csv_cell(const Json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  std::replace(s.begin(), s.end(), ',', ';');
  return s;
}

}  // namespace

std::vector<std::filesystem::path> run_sweep(const Json& base_spec, const Json& grid,
                                             const std::filesystem::path& out,
                                             const std::filesystem::path& base_dir) {
  if (!grid.is_object() || grid.empty()) throw ValidationError("grid", "expected a non-empty object");
  std::vector<std::string> keys;
  std::vector<const Json*> values;
  std::size_t total = 1;
  for (auto it = grid.begin(); it != grid.end(); ++it) {
    if (!it->is_array() || it->empty()) throw ValidationError("grid." + it.key(), "expected a non-empty array");
    keys.push_back(it.key());
    values.push_back(&*it);
    total *= it->size();
  }
  const std::string name = io::get_or<std::string>(base_spec, "name", "sweep", "spec");
  std::string index = "run,dir";
  for (const auto& k : keys) index += "," + k;
  index += "\n";
  std::vector<std::filesystem::path> dirs;
  for (std::size_t k = 0; k < total; ++k) {
    Json spec = base_spec;
    std::size_t rem = k;
    std::string row;
    // Last key varies fastest.
    std::vector<std::size_t> pick(keys.size());
    for (std::size_t d = keys.size(); d-- > 0;) {
      pick[d] = rem % values[d]->size();
      rem /= values[d]->size();
    }
    for (std::size_t d = 0; d < keys.size(); ++d) {
      const Json& v = (*values[d])[pick[d]];
      set_dotted(spec, keys[d], v);
      row += "," + csv_cell(v);
    }
    const std::string run_name = fmt::format("{}_{}", name, k);
    spec["name"] = run_name;
    spec["output_dir"] = (out / run_name).string();
    dirs.push_back(run_experiment(parse_spec(spec, base_dir)));
    index += fmt::format("{},{}{}\n", k, run_name, row);
  }
  io::write_text(out / "index.csv", index);
  return dirs;
}

}  // namespace skysum::experiment
