// Copyright 2026 The armaseg Authors.
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

// Plain-text "key = value" configuration. Keys are the long command-line
// flag names without the leading dashes; '#' starts a comment.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "armaseg/pipeline.hpp"

namespace armaseg {

using KeyValues = std::map<std::string, std::string>;

/// Throws FormatError (carrying `source`) on a line without '='.
KeyValues parse_key_values(std::string_view text, const std::string& source);
KeyValues read_key_value_file(const std::string& path);

/// Applies one setting. Returns false for keys that are not SegConfig
/// settings; throws ConfigError for a malformed value.
bool apply_setting(SegConfig& cfg, std::string_view key, std::string_view value);

/// Applies every known key; unknown keys throw ConfigError.
void apply_settings(SegConfig& cfg, const KeyValues& kv);

/// All settings, keyed as in the config file.
KeyValues describe(const SegConfig& cfg);

/// Stable 64-bit FNV-1a hash of describe(cfg), as 16 hex digits.
std::string fingerprint(const SegConfig& cfg);

}  // namespace armaseg
