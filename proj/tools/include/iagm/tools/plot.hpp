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

#include <filesystem>
#include <string>
#include <vector>

namespace iagm::tools {

/// Gnuplot options. Empty fields mean: png output next to the script, titles from
/// file names, log-scale gap axis.
struct PlotStyle {
  std::string title;
  std::string output;              ///< image file; defaults to <script stem>.png
  std::string terminal;            ///< defaults to "pngcairo size 1000,700"
  std::string ylabel;              ///< defaults to "f - f*"
  bool log_y = true;
  std::vector<std::string> labels; ///< one per CSV; defaults to the file stems
};

/// Writes a gnuplot script drawing f_gap against iteration for each CSV, plus a
/// dashed curve for every CSV whose bound column is populated. Returns the number
/// of curves written.
int emit_plot_script(const std::vector<std::filesystem::path>& csv_paths, const PlotStyle& style,
                     const std::filesystem::path& script_path);

}  // namespace iagm::tools
