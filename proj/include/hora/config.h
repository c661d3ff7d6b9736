// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HORA_CONFIG_H_
#define HORA_CONFIG_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hora/simulator.h"

namespace hora {

// Simulation configs are YAML documents whose structure mirrors the JSON
// form of SimConfig (see json_io.h), including `schema_version: 1`.
SimConfig ParseSimConfigYaml(const std::string& text);
// Throws IoError when the file cannot be read.
SimConfig LoadSimConfigFile(const std::filesystem::path& path);

// Bundled configurations, usable as `hora simulate --preset <name>`:
//   heterogeneous-default  mixed-difficulty batch, all four policies
//   bimodal                50/50 mixture of p = 0.02 and p = 0.9
//   homogeneous            every prompt at p = 0.5
std::vector<std::string> PresetNames();
SimConfig BuiltinPreset(std::string_view name);

}  // namespace hora

#endif  // HORA_CONFIG_H_
