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

namespace skysum::figures {

/// "2e", "2g", "2h", "3", "4e", "5b", "5c".
std::vector<std::string> figure_ids();

/// Writes <run_dir>/figures/fig_<id>.csv from the run's outputs and returns its
/// path. Unknown ids raise ValidationError; a run of the wrong protocol or
/// with missing files raises MissingArtifact.
std::filesystem::path emit_figure_data(const std::filesystem::path& run_dir, std::string_view id);

}  // namespace skysum::figures
