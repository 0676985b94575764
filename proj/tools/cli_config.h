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

#ifndef RCEVAL_TOOLS_CLI_CONFIG_H_
#define RCEVAL_TOOLS_CLI_CONFIG_H_

#include <istream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace rceval::cli {

// JSON config files for CLI11. Top-level keys are long option names;
// objects nest subcommands, e.g. {"seed": 3, "eval": {"diverge": {"k": 5}}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also,
                        bool write_description,
                        std::string prefix) const override;
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;
};

// Options that were set (from flags or a config file) on `app` and the
// subcommands that ran, in the same layout JsonConfig reads.
nlohmann::ordered_json ResolvedOptions(const CLI::App& app,
                                       bool default_also = false);

}  // namespace rceval::cli

#endif  // RCEVAL_TOOLS_CLI_CONFIG_H_
