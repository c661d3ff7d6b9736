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

#include "hora/config.h"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <sstream>

#include "hora/errors.h"
#include "hora/json_io.h"

namespace hora {
namespace {

Json ScalarToJson(const YAML::Node& node) {
  const std::string& s = node.Scalar();
  // Quoted scalars stay strings.
  if (node.Tag() == "!") return s;
  if (s == "~" || s == "null") return nullptr;
  if (s == "true") return true;
  if (s == "false") return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s[0] != '-') {
    std::uint64_t u = 0;
    auto [p, ec] = std::from_chars(first, last, u);
    if (ec == std::errc() && p == last) return u;
  }
  std::int64_t i = 0;
  if (auto [p, ec] = std::from_chars(first, last, i);
      ec == std::errc() && p == last) {
    return i;
  }
  double d = 0.0;
  if (auto [p, ec] = std::from_chars(first, last, d);
      ec == std::errc() && p == last) {
    return d;
  }
  return s;
}

Json YamlToJson(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Scalar:
      return ScalarToJson(node);
    case YAML::NodeType::Sequence: {
      Json a = Json::array();
      for (const auto& child : node) a.push_back(YamlToJson(child));
      return a;
    }
    case YAML::NodeType::Map: {
      Json o = Json::object();
      for (const auto& kv : node) {
        o[kv.first.as<std::string>()] = YamlToJson(kv.second);
      }
      return o;
    }
  }
  return nullptr;
}

SimConfig Base(std::vector<PopulationComponent> components) {
  SimConfig c;
  c.population.size = 60;
  c.population.components = std::move(components);
  c.group_size = 32;
  c.pre_rollouts = 8;
  c.replications = 200;
  c.seed = 20260514;
  return c;
}

}  // namespace

SimConfig ParseSimConfigYaml(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ValidationError("$", std::string("malformed config: ") + e.what());
  }
  return SimConfigFromJson(YamlToJson(root));
}

SimConfig LoadSimConfigFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseSimConfigYaml(buf.str());
}

std::vector<std::string> PresetNames() {
  return {"heterogeneous-default", "bimodal", "homogeneous"};
}

SimConfig BuiltinPreset(std::string_view name) {
  if (name == "heterogeneous-default") {
    // Mostly solved prompts, a minority of near-unsolvable ones, and a broad
    // middle; Phase A lands roughly 15% of prompts at c = 0 and half at
    // c = G0.
    SimConfig c = Base({{0.165, LatentDistribution::Beta(0.5, 12.0)},
                        {0.50, LatentDistribution::Beta(40.0, 0.35)},
                        {0.335, LatentDistribution::Uniform(0.1, 0.9)}});
    c.policies = {Policy::kHora, Policy::kUniform, Policy::kHardFirst,
                  Policy::kPlugin};
    return c;
  }
  if (name == "bimodal") {
    return Base({{0.5, LatentDistribution::Point(0.02)},
                 {0.5, LatentDistribution::Point(0.9)}});
  }
  if (name == "homogeneous") {
    return Base({{1.0, LatentDistribution::Point(0.5)}});
  }
  throw ValidationError("preset", "unknown preset '" + std::string(name) + "'");
}

}  // namespace hora
