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

#include "dfreg/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "dfreg/error.hpp"
#include "dfreg/io.hpp"

namespace dfreg {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"experiment",
       {"design", "model", "n", "reps", "seed", "statistic", "anchors", "resample_anchors",
        "theta", "errors", "error_scale", "grid_resolution", "studentize"}},
      {"alternative", {"psi", "amplitude", "local_scaling"}},
      {"power", {"levels", "null_reps"}},
  };
  return keys;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || value.empty()) {
    throw ConfigError(key + ": cannot parse '" + value + "' as a number");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

std::string section_of(const std::string& key) {
  for (const auto& [section, keys] : known_keys()) {
    if (keys.count(key)) return section;
  }
  throw ConfigError("unknown configuration key '" + key + "'");
}

// Flattens the tree to section.key -> value, rejecting unknown names.
std::map<std::string, std::string> flatten(const pt::ptree& tree) {
  std::map<std::string, std::string> out;
  for (const auto& [name, child] : tree) {
    if (child.empty()) {  // top-level key
      out["experiment." + name] = child.data();
      if (!known_keys().at("experiment").count(name)) {
        throw ConfigError("unknown configuration key '" + name + "'");
      }
      continue;
    }
    const auto it = known_keys().find(name);
    if (it == known_keys().end()) throw ConfigError("unknown configuration section '" + name + "'");
    for (const auto& [key, leaf] : child) {
      if (!it->second.count(key)) {
        throw ConfigError("unknown configuration key '" + key + "' in [" + name + "]");
      }
      out[name + "." + key] = leaf.data();
    }
  }
  return out;
}

void apply_override(std::map<std::string, std::string>& values, const std::string& item) {
  const auto eq = item.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + item + "' is not key=value");
  std::string key = trim(item.substr(0, eq));
  const std::string value = trim(item.substr(eq + 1));
  const auto dot = key.find('.');
  std::string section;
  if (dot == std::string::npos) {
    section = section_of(key);
  } else {
    section = key.substr(0, dot);
    key = key.substr(dot + 1);
    const auto it = known_keys().find(section);
    if (it == known_keys().end() || !it->second.count(key)) {
      throw ConfigError("unknown configuration key '" + section + "." + key + "'");
    }
  }
  values[section + "." + key] = value;
}

ExperimentConfig build(const std::map<std::string, std::string>& v) {
  ExperimentConfig c;
  const auto get = [&](const std::string& k) -> const std::string* {
    const auto it = v.find(k);
    return it == v.end() ? nullptr : &it->second;
  };
  const auto wrap = [](const std::string& key, auto&& fn) {
    try {
      return fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(key + ": " + e.what());
    }
  };

  if (auto s = get("experiment.design")) c.designs = split_list(*s);
  if (auto s = get("experiment.model")) c.model = trim(*s);
  if (auto s = get("experiment.n")) c.n = parse_number<Index>("n", *s);
  if (auto s = get("experiment.reps")) c.reps = parse_number<Index>("reps", *s);
  if (auto s = get("experiment.seed")) {
    c.seed = parse_number<std::uint64_t>("seed", *s);
  } else {
    throw ConfigError("seed: a seed is required");
  }
  if (auto s = get("experiment.statistic")) {
    c.statistic = wrap("statistic", [&] { return statistic_from_string(trim(*s)); });
  }
  if (auto s = get("experiment.anchors")) {
    c.anchors = wrap("anchors", [&] { return anchor_mode_from_string(trim(*s)); });
  }
  if (auto s = get("experiment.resample_anchors")) {
    c.resample_anchors = parse_bool("resample_anchors", *s);
  }
  if (auto s = get("experiment.theta")) {
    for (const auto& item : split_list(*s)) c.theta.push_back(parse_number<double>("theta", item));
  }
  if (auto s = get("experiment.errors")) {
    c.errors = wrap("errors", [&] { return error_law_from_string(trim(*s)); });
  }
  if (auto s = get("experiment.error_scale")) {
    c.error_scale = parse_number<double>("error_scale", *s);
  }
  if (auto s = get("experiment.grid_resolution")) {
    c.grid_resolution = parse_number<int>("grid_resolution", *s);
  }
  if (auto s = get("experiment.studentize")) c.studentize = parse_bool("studentize", *s);

  const bool has_alt = get("alternative.psi") || get("alternative.amplitude") ||
                       get("alternative.local_scaling");
  if (has_alt) {
    Alternative alt;
    if (auto s = get("alternative.psi")) {
      alt.psi = trim(*s);
    } else {
      throw ConfigError("psi: [alternative] needs a psi");
    }
    if (auto s = get("alternative.amplitude")) alt.amplitude = parse_number<double>("amplitude", *s);
    if (auto s = get("alternative.local_scaling")) {
      alt.local_scaling = parse_bool("local_scaling", *s);
    }
    c.alternative = alt;
  }
  if (auto s = get("power.levels")) {
    c.levels.clear();
    for (const auto& item : split_list(*s)) c.levels.push_back(parse_number<double>("levels", item));
  }
  if (auto s = get("power.null_reps")) c.null_reps = parse_number<Index>("null_reps", *s);
  validate(c);
  return c;
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + format_double(xs[i]);
  return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::vector<std::string>& overrides) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }
  auto values = flatten(tree);
  for (const auto& o : overrides) apply_override(values, o);
  return build(values);
}

ExperimentConfig parse_config(const std::filesystem::path& path,
                              const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), overrides);
}

std::string to_config_text(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "[experiment]\n";
  os << "design = ";
  for (std::size_t i = 0; i < c.designs.size(); ++i) os << (i ? ", " : "") << c.designs[i];
  os << "\nmodel = " << c.model << "\n";
  os << "n = " << c.n << "\n";
  os << "reps = " << c.reps << "\n";
  os << "seed = " << c.seed << "\n";
  os << "statistic = " << to_string(c.statistic) << "\n";
  os << "anchors = " << to_string(c.anchors) << "\n";
  os << "resample_anchors = " << (c.resample_anchors ? "true" : "false") << "\n";
  if (!c.theta.empty()) os << "theta = " << join(c.theta) << "\n";
  os << "errors = " << to_string(c.errors) << "\n";
  os << "error_scale = " << format_double(c.error_scale) << "\n";
  os << "grid_resolution = " << c.grid_resolution << "\n";
  os << "studentize = " << (c.studentize ? "true" : "false") << "\n";
  if (c.alternative) {
    os << "\n[alternative]\n";
    os << "psi = " << c.alternative->psi << "\n";
    os << "amplitude = " << format_double(c.alternative->amplitude) << "\n";
    os << "local_scaling = " << (c.alternative->local_scaling ? "true" : "false") << "\n";
  }
  os << "\n[power]\n";
  os << "levels = " << join(c.levels) << "\n";
  os << "null_reps = " << c.null_reps << "\n";
  return os.str();
}

}  // namespace dfreg
