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

#include "skysum/io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "skysum/error.hpp"

namespace skysum::io {

std::string num(double v) { return fmt::format("{}", v); }

namespace {

const char* type_name(const Json& j) { return j.type_name(); }

void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path, std::string("expected object, got ") + type_name(j));
}

}  // namespace

template <class T>
T value_as(const Json& v, const std::string& path) {
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ValidationError(path, std::string("expected boolean, got ") + type_name(v));
    return v.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw ValidationError(path, std::string("expected string, got ") + type_name(v));
    return v.get<std::string>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) {
      throw ValidationError(path, std::string("expected integer, got ") + type_name(v));
    }
    if constexpr (std::is_unsigned_v<T>) {
      if (v.is_number_unsigned()) return static_cast<T>(v.get<std::uint64_t>());
      const auto s = v.get<std::int64_t>();
      if (s < 0) throw ValidationError(path, "must be non-negative");
      return static_cast<T>(s);
    } else {
      return static_cast<T>(v.get<std::int64_t>());
    }
  } else {
    if (!v.is_number()) throw ValidationError(path, std::string("expected number, got ") + type_name(v));
    return v.get<T>();
  }
}

template <class T>
T get_or(const Json& obj, const char* key, T fallback, const std::string& path) {
  require_object(obj, path);
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  return value_as<T>(*it, path + "." + key);
}

template bool value_as<bool>(const Json&, const std::string&);
template int value_as<int>(const Json&, const std::string&);
template std::int64_t value_as<std::int64_t>(const Json&, const std::string&);
template std::uint64_t value_as<std::uint64_t>(const Json&, const std::string&);
template double value_as<double>(const Json&, const std::string&);
template std::string value_as<std::string>(const Json&, const std::string&);

template bool get_or<bool>(const Json&, const char*, bool, const std::string&);
template int get_or<int>(const Json&, const char*, int, const std::string&);
template std::int64_t get_or<std::int64_t>(const Json&, const char*, std::int64_t,
                                           const std::string&);
template std::uint64_t get_or<std::uint64_t>(const Json&, const char*, std::uint64_t,
                                             const std::string&);
template double get_or<double>(const Json&, const char*, double, const std::string&);
template std::string get_or<std::string>(const Json&, const char*, std::string,
                                         const std::string&);

Json to_json(const device::DeviceCalibration& c) {
  Json vp = Json::array();
  for (const auto& p : c.velocity_points) vp.push_back({p.current_density, p.velocity});
  return Json{{"weight_field_slope", c.weight_field_slope},
              {"field_max", c.field_max},
              {"field_min", c.field_min},
              {"duration_ref", c.duration_ref},
              {"duration_zero", c.duration_zero},
              {"current_ref", c.current_ref},
              {"current_threshold", c.current_threshold},
              {"velocity_points", vp},
              {"hall_angle", c.hall_angle},
              {"per_skyrmion_voltage_mean", c.per_skyrmion_voltage_mean},
              {"per_skyrmion_voltage_std", c.per_skyrmion_voltage_std},
              {"skyrmion_diameter", c.skyrmion_diameter},
              {"track_width", c.track_width},
              {"track_length", c.track_length},
              {"notch_depth_fraction", c.notch_depth_fraction},
              {"multilayer_thickness", c.multilayer_thickness},
              {"notch_x", c.notch_x},
              {"full_reversal_voltage", c.full_reversal_voltage},
              {"read_current", c.read_current}};
}

device::DeviceCalibration apply_overrides(device::DeviceCalibration c, const Json& o,
                                          const std::string& path) {
  require_object(o, path);
  for (auto it = o.begin(); it != o.end(); ++it) {
    const std::string& k = it.key();
    const std::string p = path + "." + k;
    const Json& v = it.value();
    if (k == "velocity_points") {
      if (!v.is_array()) throw ValidationError(p, "expected array of [J, v] pairs");
      c.velocity_points.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string pi = fmt::format("{}[{}]", p, i);
        if (!v[i].is_array() || v[i].size() != 2) throw ValidationError(pi, "expected [J, v]");
        c.velocity_points.push_back({value_as<double>(v[i][0], pi), value_as<double>(v[i][1], pi)});
      }
      continue;
    }
    double* field = nullptr;
    if (k == "weight_field_slope") field = &c.weight_field_slope;
    else if (k == "field_max") field = &c.field_max;
    else if (k == "field_min") field = &c.field_min;
    else if (k == "duration_ref") field = &c.duration_ref;
    else if (k == "duration_zero") field = &c.duration_zero;
    else if (k == "current_ref") field = &c.current_ref;
    else if (k == "current_threshold") field = &c.current_threshold;
    else if (k == "hall_angle") field = &c.hall_angle;
    else if (k == "per_skyrmion_voltage_mean") field = &c.per_skyrmion_voltage_mean;
    else if (k == "per_skyrmion_voltage_std") field = &c.per_skyrmion_voltage_std;
    else if (k == "skyrmion_diameter") field = &c.skyrmion_diameter;
    else if (k == "track_width") field = &c.track_width;
    else if (k == "track_length") field = &c.track_length;
    else if (k == "notch_depth_fraction") field = &c.notch_depth_fraction;
    else if (k == "multilayer_thickness") field = &c.multilayer_thickness;
    else if (k == "notch_x") field = &c.notch_x;
    else if (k == "full_reversal_voltage") field = &c.full_reversal_voltage;
    else if (k == "read_current") field = &c.read_current;
    if (!field) throw ValidationError(p, "unknown calibration field");
    *field = value_as<double>(v, p);
  }
  return c;
}

device::DeviceCalibration calibration_from_json(const Json& j, const std::string& path) {
  require_object(j, path);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "preset" && it.key() != "overrides") {
      throw ValidationError(path + "." + it.key(), "unknown key (expected preset, overrides)");
    }
  }
  auto cal = device::preset(get_or<std::string>(j, "preset", "paper2024", path));
  if (auto it = j.find("overrides"); it != j.end()) cal = apply_overrides(cal, *it, path + ".overrides");
  cal.validate(path);
  return cal;
}

Json to_json(const nucleation::StochasticModel& m) {
  return Json{{"p_bar", m.p_bar}, {"split_even", m.split_even}, {"up_fraction", m.up_fraction}};
}

nucleation::StochasticModel stochastic_from_json(const Json& j, const std::string& path) {
  nucleation::StochasticModel m;
  m.p_bar = get_or(j, "p_bar", m.p_bar, path);
  m.split_even = get_or(j, "split_even", m.split_even, path);
  m.up_fraction = get_or(j, "up_fraction", m.up_fraction, path);
  try {
    m.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(path + e.path().substr(e.path().find('.')), "out of range");
  }
  return m;
}

Json to_json(const transport::DetectionZone& z) {
  return Json{{"center_x", z.center_x}, {"center_y", z.center_y}, {"side", z.side},
              {"capacity", z.capacity}};
}

transport::DetectionZone zone_from_json(const Json& j, const std::string& path,
                                        transport::DetectionZone z) {
  z.center_x = get_or(j, "center_x", z.center_x, path);
  z.center_y = get_or(j, "center_y", z.center_y, path);
  z.side = get_or(j, "side", z.side, path);
  z.capacity = get_or(j, "capacity", z.capacity, path);
  return z;
}

Json to_json(const readout::ReadoutNoise& n) {
  return Json{{"enabled", n.enabled}, {"sigma_meas", n.sigma_meas}};
}

readout::ReadoutNoise noise_from_json(const Json& j, const std::string& path,
                                      readout::ReadoutNoise n) {
  n.enabled = get_or(j, "enabled", n.enabled, path);
  n.sigma_meas = get_or(j, "sigma_meas", n.sigma_meas, path);
  n.validate(path);
  return n;
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& p, std::string_view content) {
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  if (ec) throw IoError("cannot create " + p.parent_path().string() + ": " + ec.message());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed: " + p.string());
}

Json read_json(const std::filesystem::path& p) {
  const auto text = read_text(p);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(p.string(), std::string("invalid JSON: ") + e.what());
  }
}

void write_json(const std::filesystem::path& p, const Json& j) { write_text(p, j.dump(2) + "\n"); }

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw MissingArtifact(fmt::format("CSV column '{}' not found", name));
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& p) {
  if (!std::filesystem::exists(p)) throw MissingArtifact("missing " + p.string());
  std::istringstream in(read_text(p));
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw MissingArtifact("empty CSV " + p.string());
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = split(line);
    if (row.size() != t.header.size()) {
      throw IoError(fmt::format("{}: row with {} fields, header has {}", p.string(), row.size(),
                                t.header.size()));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string to_csv(const CsvTable& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out;
}

}  // namespace skysum::io
