// Copyright 2026 The rceval Authors.
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

#include "cli_config.h"

#include <utility>

namespace rceval::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

void Flatten(const nlohmann::json& j, std::vector<std::string> parents,
             std::vector<CLI::ConfigItem>& out) {
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      auto nested = parents;
      nested.push_back(key);
      Flatten(value, std::move(nested), out);
      continue;
    }
    CLI::ConfigItem item;
    item.parents = parents;
    item.name = key;
    auto to_input = [](const nlohmann::json& v) {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
      return v.dump();
    };
    if (value.is_array()) {
      for (const auto& v : value) item.inputs.push_back(to_input(v));
    } else if (!value.is_null()) {
      item.inputs.push_back(to_input(value));
    }
    out.push_back(std::move(item));
  }
}

ordered_json OptionValue(const CLI::Option* opt, bool default_also) {
  if (opt->get_expected_min() == 0) {
    // Flag.
    return opt->count() > 0 ? ordered_json(opt->as<bool>()) : ordered_json(false);
  }
  std::vector<std::string> values = opt->results();
  if (values.empty() && default_also) {
    const std::string def = opt->get_default_str();
    if (!def.empty()) values.push_back(def);
  }
  if (values.empty()) return nullptr;
  if (values.size() == 1 && opt->get_expected_max() <= 1) return values[0];
  return values;
}

ordered_json Collect(const CLI::App& app, bool default_also) {
  ordered_json j = ordered_json::object();
  for (const CLI::Option* opt : app.get_options()) {
    if (!opt->get_configurable() || opt->get_lnames().empty()) continue;
    if (opt == app.get_help_ptr() || opt == app.get_config_ptr()) continue;
    if (opt->count() == 0 && !default_also) continue;
    ordered_json value = OptionValue(opt, default_also);
    if (value.is_null()) continue;
    j[opt->get_lnames().front()] = std::move(value);
  }
  for (const CLI::App* sub : app.get_subcommands()) {
    if (sub->get_name().empty()) continue;
    j[sub->get_name()] = Collect(*sub, default_also);
  }
  return j;
}

}  // namespace

std::string JsonConfig::to_config(const CLI::App* app, bool default_also,
                                  bool, std::string) const {
  return Collect(*app, default_also).dump(2);
}

std::vector<CLI::ConfigItem> JsonConfig::from_config(
    std::istream& input) const {
  nlohmann::json j;
  try {
    input >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw CLI::ConversionError(std::string("config file: ") + e.what());
  }
  if (!j.is_object()) {
    throw CLI::ConversionError("config file must be a JSON object");
  }
  std::vector<CLI::ConfigItem> items;
  Flatten(j, {}, items);
  return items;
}

ordered_json ResolvedOptions(const CLI::App& app, bool default_also) {
  return Collect(app, default_also);
}

}  // namespace rceval::cli
