// Copyright 2026 The dmlab Authors
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

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "dmlab/certify.hpp"
#include "dmlab/distributions.hpp"

namespace dmlab {

using Json = nlohmann::ordered_json;

// JSON forms. Parsing is strict: unknown keys and wrong types raise
// ConfigError.

DistributionSpec distribution_from_json(const Json& j);
Json to_json(const DistributionSpec& spec);

/// {"family": "lp", "p": 2 | "inf", "n": ...} or {"family": "max-dot",
/// "rows": "functionals.csv"}. Relative paths resolve against base_dir.
SpaceSpec space_from_json(const Json& j, const std::string& base_dir = {});
Json to_json(const SpaceSpec& spec);

CertifyConfig config_from_json(const Json& j, const std::string& base_dir = {});

/// Every field, defaults filled in; the input of config_hash.
Json to_json(const CertifyConfig& config);

/// Reads and parses a config file. Throws ConfigError on I/O or parse errors.
CertifyConfig load_config(const std::string& path);

/// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

/// FNV-1a 64 over the canonical dump of to_json(config), as 16 hex digits.
std::string config_hash(const CertifyConfig& config);

}  // namespace dmlab
