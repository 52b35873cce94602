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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "iagm/trace.hpp"
#include "iagm/tools/config.hpp"

namespace iagm::tools {

struct CellOutput {
  std::filesystem::path csv;
  std::string parameter;
  double value = 0.0;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::Completed;
  std::size_t rows = 0;
};

struct ExperimentResult {
  std::string experiment;
  std::filesystem::path dir;
  std::vector<CellOutput> cells;
  std::filesystem::path index;
  std::optional<std::filesystem::path> plot_script;
  std::vector<std::filesystem::path> summaries;

  /// True when every run diverged.
  bool divergence_only() const;
};

const std::vector<std::string>& experiment_names();
bool is_registered(const std::string& name);

/// The configuration with the experiment's defaults filled in.
ExperimentConfig resolve(const ExperimentConfig& config);

/// Runs every (parameter, seed) cell concurrently and writes
/// <out>/<experiment>/<parameter>_<value>_seed<seed>.csv plus index.csv.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace iagm::tools
