// Copyright 2026 The iagm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "iagm/tools/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace iagm::tools {
namespace {

using nlohmann::json;

const std::set<std::string> kKeys = {"experiment", "seeds", "iters", "out",    "overlay",
                                     "n",          "k",     "L_f",   "mu",     "chi",
                                     "grid",       "tau",   "solver", "noise_radius",
                                     "threads"};

template <typename T>
void read_optional(const json& doc, const char* key, std::optional<T>& field) {
  if (doc.contains(key)) field = doc.at(key).get<T>();
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kKeys.count(key)) throw ConfigError("config: unknown key '" + key + "'");
    if (value.is_object()) throw ConfigError("config: key '" + key + "' must not be nested");
  }

  ExperimentConfig c;
  try {
    if (doc.contains("experiment")) c.experiment = doc.at("experiment").get<std::string>();
    if (doc.contains("seeds")) {
      const auto& s = doc.at("seeds");
      auto seed = [](const json& v) {
        if (!v.is_number_unsigned()) throw ConfigError("config: seeds must be non-negative integers");
        return v.get<std::uint64_t>();
      };
      if (s.is_array()) {
        for (const auto& v : s) c.seeds.push_back(seed(v));
      } else {
        c.seeds.push_back(seed(s));
      }
    }
    read_optional(doc, "iters", c.iters);
    if (doc.contains("out")) c.out = doc.at("out").get<std::string>();
    if (doc.contains("overlay")) c.overlay = doc.at("overlay").get<bool>();
    read_optional(doc, "n", c.n);
    read_optional(doc, "k", c.k);
    read_optional(doc, "L_f", c.L_f);
    read_optional(doc, "mu", c.mu);
    read_optional(doc, "chi", c.chi);
    if (doc.contains("grid")) c.grid = doc.at("grid").get<std::vector<double>>();
    read_optional(doc, "tau", c.tau);
    read_optional(doc, "solver", c.solver);
    read_optional(doc, "noise_radius", c.noise_radius);
    if (doc.contains("threads")) c.threads = doc.at("threads").get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void merge_config(ExperimentConfig& base, const ExperimentConfig& o) {
  if (!o.experiment.empty()) base.experiment = o.experiment;
  if (!o.seeds.empty()) base.seeds = o.seeds;
  if (o.iters) base.iters = o.iters;
  if (o.out != ExperimentConfig{}.out) base.out = o.out;
  if (o.overlay) base.overlay = true;
  if (o.n) base.n = o.n;
  if (o.k) base.k = o.k;
  if (o.L_f) base.L_f = o.L_f;
  if (o.mu) base.mu = o.mu;
  if (o.chi) base.chi = o.chi;
  if (!o.grid.empty()) base.grid = o.grid;
  if (o.tau) base.tau = o.tau;
  if (o.solver) base.solver = o.solver;
  if (o.noise_radius) base.noise_radius = o.noise_radius;
  if (o.threads != 0) base.threads = o.threads;
}

std::string to_json(const ExperimentConfig& c) {
  json doc;
  doc["experiment"] = c.experiment;
  doc["seeds"] = c.seeds;
  if (c.iters) doc["iters"] = *c.iters;
  doc["out"] = c.out.string();
  doc["overlay"] = c.overlay;
  if (c.n) doc["n"] = *c.n;
  if (c.k) doc["k"] = *c.k;
  if (c.L_f) doc["L_f"] = *c.L_f;
  if (c.mu) doc["mu"] = *c.mu;
  if (c.chi) doc["chi"] = *c.chi;
  if (!c.grid.empty()) doc["grid"] = c.grid;
  if (c.tau) doc["tau"] = *c.tau;
  if (c.solver) doc["solver"] = *c.solver;
  if (c.noise_radius) doc["noise_radius"] = *c.noise_radius;
  return doc.dump(2);
}

}  // namespace iagm::tools
