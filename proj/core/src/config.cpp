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

#include "armaseg/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "armaseg/errors.hpp"

namespace armaseg {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string bad_value(std::string_view key, std::string_view value,
                      std::string_view expected) {
  return "setting '" + std::string(key) + "': cannot parse '" +
         std::string(value) + "' as " + std::string(expected);
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view value) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(bad_value(key, value, "an integer"));
  }
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  // std::from_chars for double is incomplete in libstdc++ 11.
  const std::string text(value);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(bad_value(key, value, "a number"));
  }
  if (used != text.size()) throw ConfigError(bad_value(key, value, "a number"));
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError(bad_value(key, value, "a boolean"));
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

KeyValues parse_key_values(std::string_view text, const std::string& source) {
  KeyValues out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError(source, "line " + std::to_string(line_no) +
                                    ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw FormatError(source, "line " + std::to_string(line_no) + ": empty key");
    }
    out[std::string(key)] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

KeyValues read_key_value_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError(path, "cannot open config file");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_key_values(ss.str(), path);
}

bool apply_setting(SegConfig& cfg, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "tau") {
    cfg.graph.tau = parse_double(key, value);
  } else if (key == "allow-self-loops") {
    cfg.graph.allow_self_loops = parse_bool(key, value);
  } else if (key == "activation") {
    cfg.net.activation = ad::parse_activation(value);
  } else if (key == "arch") {
    cfg.net.arch = parse_architecture(value);
  } else if (key == "stacks") {
    cfg.net.stacks = parse_int<int>(key, value);
  } else if (key == "layers") {
    cfg.net.layers = parse_int<int>(key, value);
  } else if (key == "hidden") {
    cfg.net.hidden = parse_int<int>(key, value);
  } else if (key == "head-hidden") {
    cfg.net.head_hidden = parse_int<int>(key, value);
  } else if (key == "shared-weights") {
    cfg.net.shared_weights = parse_bool(key, value);
  } else if (key == "activate-last") {
    cfg.net.activate_last = parse_bool(key, value);
  } else if (key == "epochs") {
    cfg.optim.epochs = parse_int<int>(key, value);
  } else if (key == "seed") {
    cfg.optim.seed = parse_int<std::uint64_t>(key, value);
  } else if (key == "lr") {
    cfg.optim.lr = parse_double(key, value);
  } else if (key == "weight-decay") {
    cfg.optim.weight_decay = parse_double(key, value);
  } else if (key == "lr-decay") {
    cfg.optim.lr_decay = parse_double(key, value);
  } else if (key == "clusters") {
    cfg.clusters = parse_int<int>(key, value);
  } else if (key == "patch") {
    cfg.patch = parse_int<int>(key, value);
  } else if (key == "no-refine") {
    cfg.refine = !parse_bool(key, value);
  } else if (key == "soft-upsample") {
    cfg.soft_upsample = parse_bool(key, value);
  } else if (key == "losscurve") {
    cfg.losscurve = parse_bool(key, value);
  } else if (key == "threads") {
    cfg.threads = parse_int<int>(key, value);
  } else {
    return false;
  }
  return true;
}

void apply_settings(SegConfig& cfg, const KeyValues& kv) {
  for (const auto& [key, value] : kv) {
    if (!apply_setting(cfg, key, value)) {
      throw ConfigError("unknown setting '" + key + "'");
    }
  }
}

KeyValues describe(const SegConfig& cfg) {
  const auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  return {
      {"tau", format_double(cfg.graph.tau)},
      {"allow-self-loops", b(cfg.graph.allow_self_loops)},
      {"activation", std::string(ad::to_string(cfg.net.activation))},
      {"arch", std::string(to_string(cfg.net.arch))},
      {"stacks", std::to_string(cfg.net.stacks)},
      {"layers", std::to_string(cfg.net.layers)},
      {"hidden", std::to_string(cfg.net.hidden)},
      {"head-hidden", std::to_string(cfg.net.head_hidden)},
      {"shared-weights", b(cfg.net.shared_weights)},
      {"activate-last", b(cfg.net.activate_last)},
      {"epochs", std::to_string(cfg.optim.epochs)},
      {"seed", std::to_string(cfg.optim.seed)},
      {"lr", format_double(cfg.optim.lr)},
      {"weight-decay", format_double(cfg.optim.weight_decay)},
      {"lr-decay", format_double(cfg.optim.lr_decay)},
      {"clusters", std::to_string(cfg.clusters)},
      {"patch", std::to_string(cfg.patch)},
      {"no-refine", b(!cfg.refine)},
      {"soft-upsample", b(cfg.soft_upsample)},
      {"losscurve", b(cfg.losscurve)},
      {"threads", std::to_string(cfg.threads)},
  };
}

std::string fingerprint(const SegConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [key, value] : describe(cfg)) {
    // Thread count does not change results.
    if (key == "threads") continue;
    mix(key);
    mix("=");
    mix(value);
    mix("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace armaseg
