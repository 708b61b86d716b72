// Copyright 2026 The dfreg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DFREG_CONFIG_HPP_
#define DFREG_CONFIG_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "dfreg/harness.hpp"

namespace dfreg {

// Experiment files are INI-style:
//
//   [experiment]
//   design = uniform_0_2, normal_1_2
//   model = simple_linear
//   n = 200
//   reps = 2000
//   seed = 1
//
//   [alternative]        ; optional
//   psi = x2_cubed
//   amplitude = 1
//
//   [power]              ; optional
//   levels = 0.05, 0.1
//
// Keys outside any section belong to [experiment]. Unknown sections and keys,
// malformed values and a missing seed are ConfigErrors naming the key.
// Overrides are "key=value" or "section.key=value" and win over the file.
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::vector<std::string>& overrides = {});
ExperimentConfig parse_config(const std::filesystem::path& path,
                              const std::vector<std::string>& overrides = {});

// Full effective configuration in the same format; parse_config_text of the
// result reproduces `config` exactly.
std::string to_config_text(const ExperimentConfig& config);

}  // namespace dfreg

#endif  // DFREG_CONFIG_HPP_
