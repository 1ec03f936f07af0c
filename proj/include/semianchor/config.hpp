// Copyright 2026 The Semianchor Authors. All Rights Reserved.
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

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "semianchor/trainer.hpp"

namespace semianchor {

// Everything a run can be configured with. Defaults: 5 scales x 5 aspects,
// sigma 0.9, the simplified location rule, Top-1 decoding, lambda_reg 2 and
// lambda_ac 1.
struct RunConfig {
  TrainConfig train;
  std::string annotations;  // input annotation file
  std::string output_dir;   // where CLI artifacts go

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat "key = value" lines; '#' starts a comment, blank lines are ignored.
// Unknown keys, duplicates and out-of-range values raise ConfigError naming
// the key. Omitted keys keep their defaults.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Every key, one per line, with doubles printed exactly (17 significant
// digits), so that parse_config(format_config(c)) == c.
std::string format_config(const RunConfig& cfg);
void save_config(const RunConfig& cfg, const std::string& path);

// Applies one assignment as if it were a line of the file.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

std::vector<std::string> config_keys();

}  // namespace semianchor
