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


#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace iagm::tools {

/// Everything needed to reproduce one experiment. Unset optionals fall back to the
/// experiment's own defaults.
struct ExperimentConfig {
  std::string experiment;
  std::vector<std::uint64_t> seeds;
  std::optional<long> iters;
  std::filesystem::path out = "out";
  bool overlay = false;

  // Problem.
  std::optional<int> n;
  std::optional<int> k;
  std::optional<double> L_f;
  std::optional<double> mu;
  std::optional<double> chi;

  // Oracle / solver.
  std::vector<double> grid;  ///< parameter values (delta, alpha, eps, batch, ...)
  std::optional<int> tau;
  std::optional<std::string> solver;
  std::optional<std::string> noise_radius;  ///< "sphere" or "uniform"

  int threads = 0;  ///< 0: hardware concurrency
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a flat JSON object. Unknown keys are rejected.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& json_text);

/// Overwrites fields of `base` that are set in `overrides`.
void merge_config(ExperimentConfig& base, const ExperimentConfig& overrides);

std::string to_json(const ExperimentConfig& config);

}  // namespace iagm::tools
