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


#include "iagm/tools/plot.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "iagm/trace.hpp"

namespace iagm::tools {
namespace {

constexpr int kIterColumn = 1;
constexpr int kGapColumn = 2;
constexpr int kBoundColumn = 8;

bool has_bound_values(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw std::runtime_error("emit_plot_script: missing CSV " + csv.string());
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("emit_plot_script: unexpected header in " + csv.string());
  }
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string field;
    for (int col = 1; std::getline(fields, field, ','); ++col) {
      if (col == kBoundColumn) {
        if (!field.empty()) return true;
        break;
      }
    }
  }
  return false;
}

std::string quoted(const std::string& s) {
  std::string out = "'";
  for (const char c : s) {
    if (c == '\'') out += "''";
    else out += c;
  }
  return out + "'";
}

}  // namespace

int emit_plot_script(const std::vector<std::filesystem::path>& csv_paths, const PlotStyle& style,
                     const std::filesystem::path& script_path) {
  if (csv_paths.empty()) throw std::invalid_argument("emit_plot_script: no CSVs given");
  if (!style.labels.empty() && style.labels.size() != csv_paths.size()) {
    throw std::invalid_argument("emit_plot_script: one label per CSV required");
  }
  std::vector<bool> bounded;
  for (const auto& p : csv_paths) bounded.push_back(has_bound_values(p));

  const auto dir = script_path.parent_path().empty() ? std::filesystem::path(".")
                                                     : script_path.parent_path();
  auto relative = [&](const std::filesystem::path& p) {
    return std::filesystem::weakly_canonical(p).lexically_relative(
        std::filesystem::weakly_canonical(dir)).generic_string();
  };
  const std::string terminal = style.terminal.empty() ? "pngcairo size 1000,700" : style.terminal;
  const std::string output =
      style.output.empty() ? script_path.stem().string() + ".png" : style.output;

  std::ostringstream gp;
  gp << "# gnuplot script; run from this directory: gnuplot " << script_path.filename().string()
     << "\n";
  gp << "set terminal " << terminal << "\n";
  gp << "set output " << quoted(output) << "\n";
  gp << "set datafile separator ','\n";
  gp << "set datafile missing ''\n";
  if (!style.title.empty()) gp << "set title " << quoted(style.title) << "\n";
  gp << "set xlabel 'iteration'\n";
  gp << "set ylabel " << quoted(style.ylabel.empty() ? "f - f*" : style.ylabel) << "\n";
  if (style.log_y) gp << "set logscale y\nset format y '10^{%L}'\n";
  gp << "set key outside right\n";
  gp << "plot \\\n";

  int curves = 0;
  for (std::size_t i = 0; i < csv_paths.size(); ++i) {
    const std::string file = quoted(relative(csv_paths[i]));
    const std::string label =
        style.labels.empty() ? csv_paths[i].stem().string() : style.labels[i];
    const int color = static_cast<int>(i) + 1;
    if (curves > 0) gp << ", \\\n";
    gp << "  " << file << " using " << kIterColumn << ":" << kGapColumn
       << " every ::1 with lines lc " << color << " dt 1 title " << quoted(label);
    ++curves;
    if (bounded[i]) {
      gp << ", \\\n  " << file << " using " << kIterColumn << ":" << kBoundColumn
         << " every ::1 with lines lc " << color << " dt 2 title " << quoted(label + " bound");
      ++curves;
    }
  }
  gp << "\n";

  std::ofstream out(script_path);
  if (!out) throw std::runtime_error("emit_plot_script: cannot write " + script_path.string());
  out << gp.str();
  if (!out) throw std::runtime_error("emit_plot_script: write failed for " + script_path.string());
  return curves;
}

}  // namespace iagm::tools
