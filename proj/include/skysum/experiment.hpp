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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "skysum/device_model.hpp"
#include "skysum/io.hpp"
#include "skysum/nucleation.hpp"

namespace skysum::experiment {

enum class Protocol { nucleation_sweep, detection_run, fig4_twotrack, montecarlo_sigma, pareto, netsim };

std::string_view protocol_name(Protocol p) noexcept;
std::vector<std::string> protocol_names();

struct ExperimentSpec {
  std::string name;
  Protocol protocol = Protocol::nucleation_sweep;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  std::string preset = "paper2024";
  io::Json calibration_overrides = io::Json::object();
  nucleation::StochasticModel stochastic;
  /// Protocol-specific parameters; validated when the run starts.
  io::Json params = io::Json::object();
  /// Directory relative paths inside params are resolved against.
  std::filesystem::path base_dir;

  device::DeviceCalibration calibration() const;
  /// Throws ValidationError for structural problems and bad protocol params.
  void validate() const;
};

/// Parses a spec document; error paths are rooted at "spec".
ExperimentSpec parse_spec(const io::Json& j, const std::filesystem::path& base_dir = {});
ExperimentSpec load_spec(const std::filesystem::path& file);

/// Snapshot that reproduces the run on its own (calibration fully expanded).
io::Json spec_to_json(const ExperimentSpec& spec);

/// Runs the protocol and writes config.json, CSV outputs, summary.json and
/// manifest.json into spec.output_dir. Returns the run directory.
std::filesystem::path run_experiment(const ExperimentSpec& spec);

/// Cartesian grid over dotted spec paths, e.g. {"params.h_z": [20, 22]}.
/// Each run goes to <out>/<name>_<k>; <out>/index.csv lists the assignments.
std::vector<std::filesystem::path> run_sweep(const io::Json& base_spec, const io::Json& grid,
                                             const std::filesystem::path& out,
                                             const std::filesystem::path& base_dir = {});

inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace skysum::experiment
