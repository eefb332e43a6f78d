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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "skysum/crossbar.hpp"
#include "skysum/device_model.hpp"
#include "skysum/nucleation.hpp"
#include "skysum/readout.hpp"
#include "skysum/transport.hpp"

namespace skysum::io {

using Json = nlohmann::ordered_json;

/// Shortest decimal text that round-trips the double.
std::string num(double v);

Json to_json(const device::DeviceCalibration& cal);
/// Applies the keys of `overrides` onto `base`; unknown keys and wrong types
/// raise ValidationError naming `path`.<key>.
device::DeviceCalibration apply_overrides(device::DeviceCalibration base, const Json& overrides,
                                          const std::string& path);
/// {"preset": name, "overrides": {...}}; missing preset means "paper2024".
device::DeviceCalibration calibration_from_json(const Json& j, const std::string& path);

Json to_json(const nucleation::StochasticModel& m);
nucleation::StochasticModel stochastic_from_json(const Json& j, const std::string& path);

Json to_json(const transport::DetectionZone& z);
transport::DetectionZone zone_from_json(const Json& j, const std::string& path,
                                        transport::DetectionZone base);

Json to_json(const readout::ReadoutNoise& n);
readout::ReadoutNoise noise_from_json(const Json& j, const std::string& path,
                                      readout::ReadoutNoise base);

/// Typed field access with error paths; `fallback` is returned when absent.
/// Converts one JSON value, naming `path` in the ValidationError on mismatch.
template <class T>
T value_as(const Json& v, const std::string& path);

template <class T>
T get_or(const Json& obj, const char* key, T fallback, const std::string& path);

std::string read_text(const std::filesystem::path& p);
/// Writes atomically enough for our purposes: truncates then writes; throws IoError.
void write_text(const std::filesystem::path& p, std::string_view content);
Json read_json(const std::filesystem::path& p);
void write_json(const std::filesystem::path& p, const Json& j);

/// Minimal CSV table (no quoting; our writers never emit commas in fields).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of `name` in the header; throws MissingArtifact.
  std::size_t column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& p);
std::string to_csv(const CsvTable& t);

}  // namespace skysum::io
