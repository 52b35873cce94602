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


#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "iagm/baselines.hpp"
#include "iagm/stm2.hpp"
#include "iagm/testbed.hpp"
#include "iagm/tools/config.hpp"
#include "iagm/tools/experiments.hpp"
#include "iagm/tools/plot.hpp"
#include "iagm/tools/threshold.hpp"

namespace iagm::tools {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int count_lines(const std::string& text) {
  return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
}

int count_occurrences(const std::string& text, const std::string& needle) {
  int n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::current_path() / "tools_test_out" / name;
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig small(const std::string& experiment, const std::string& out_name) {
  ExperimentConfig c;
  c.experiment = experiment;
  c.iters = 60;
  c.n = 20;
  c.k = 10;
  c.out = scratch(out_name);
  return c;
}

TEST(Config, ParsesAllKeys) {
  const ExperimentConfig c = parse_config(R"({"experiment": "fig7", "seeds": [3, 4], "iters": 10,
      "out": "x", "overlay": true, "n": 5, "k": 3, "L_f": 2, "mu": 0.2, "chi": 10, "grid": [0.1],
      "tau": 1, "solver": "stm", "noise_radius": "uniform", "threads": 2})");
  EXPECT_EQ(c.experiment, "fig7");
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{3, 4}));
  EXPECT_EQ(*c.iters, 10);
  EXPECT_EQ(c.out, fs::path("x"));
  EXPECT_TRUE(c.overlay);
  EXPECT_EQ(*c.n, 5);
  EXPECT_EQ(*c.k, 3);
  EXPECT_EQ(*c.L_f, 2.0);
  EXPECT_EQ(*c.mu, 0.2);
  EXPECT_EQ(*c.chi, 10.0);
  EXPECT_EQ(c.grid, std::vector<double>{0.1});
  EXPECT_EQ(*c.tau, 1);
  EXPECT_EQ(*c.solver, "stm");
  EXPECT_EQ(*c.noise_radius, "uniform");
  EXPECT_EQ(c.threads, 2);
}

TEST(Config, ScalarSeedIsAccepted) {
  EXPECT_EQ(parse_config(R"({"seeds": 7})").seeds, std::vector<std::uint64_t>{7});
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(parse_config("{"), ConfigError);
  EXPECT_THROW(parse_config("[1, 2]"), ConfigError);
  EXPECT_THROW(parse_config(R"({"delta": 0.1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"experiment": {"name": "fig3"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"iters": "many"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"seeds": [-1]})"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/iagm.json"), ConfigError);
}

TEST(Config, MergeLetsOverridesWin) {
  ExperimentConfig base = parse_config(R"({"experiment": "fig3", "iters": 10, "n": 5, "grid": [1]})");
  const ExperimentConfig over = parse_config(R"({"iters": 20, "grid": [2, 3]})");
  merge_config(base, over);
  EXPECT_EQ(base.experiment, "fig3");
  EXPECT_EQ(*base.iters, 20);
  EXPECT_EQ(*base.n, 5);
  EXPECT_EQ(base.grid, (std::vector<double>{2.0, 3.0}));
}

TEST(Config, JsonRoundTrip) {
  const ExperimentConfig c = parse_config(R"({"experiment": "fig4", "seeds": [1], "iters": 30, "mu": 0.5})");
  const ExperimentConfig back = parse_config(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
}

TEST(Resolve, AppliesDefaultsAndValidates) {
  ExperimentConfig c;
  c.experiment = "fig8";
  const ExperimentConfig r = resolve(c);
  EXPECT_EQ(r.seeds.size(), 30u);
  EXPECT_EQ(*r.n, 100);
  EXPECT_EQ(*r.mu, 0.1);
  c.experiment = "gd-drift";
  EXPECT_EQ(*resolve(c).mu, 0.01);
  c.experiment = "fig10";
  const auto g = resolve(c).grid;
  ASSERT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g[2], max_alpha_relative(0.1, 10.0));

  c.experiment = "fig99";
  EXPECT_THROW(resolve(c), ConfigError);
  c.experiment = "fig3";
  c.iters = 0;
  EXPECT_THROW(resolve(c), ConfigError);
  c.iters = 50001;
  EXPECT_THROW(resolve(c), ConfigError);
  c.iters = 10;
  c.tau = 3;
  EXPECT_THROW(resolve(c), ConfigError);
  c.tau.reset();
  c.solver = "adam";
  EXPECT_THROW(resolve(c), ConfigError);
  c.solver.reset();
  c.noise_radius = "gaussian";
  EXPECT_THROW(resolve(c), ConfigError);
}

TEST(Registry, AllNamesRegistered) {
  for (const auto& name : experiment_names()) EXPECT_TRUE(is_registered(name)) << name;
  EXPECT_FALSE(is_registered("fig2"));
}

TEST(Experiments, WritesOneCsvPerCellWithAllRows) {
  const ExperimentResult r = run_experiment(small("fig3", "fig3"));
  ASSERT_EQ(r.cells.size(), 5u);
  for (const auto& cell : r.cells) {
    ASSERT_TRUE(fs::exists(cell.csv));
    EXPECT_EQ(cell.rows, 61u);
    EXPECT_EQ(count_lines(slurp(cell.csv)), 62);
    EXPECT_EQ(cell.csv.filename().string().rfind(cell.parameter + "_", 0), 0u);
  }
  EXPECT_EQ(count_lines(slurp(r.index)), 6);
  EXPECT_TRUE(fs::exists(r.dir / "config.json"));
  ASSERT_TRUE(r.plot_script.has_value());
  EXPECT_EQ(count_occurrences(slurp(*r.plot_script), "using 1:2"), 5);
  EXPECT_FALSE(r.divergence_only());
}

TEST(Experiments, RerunIsByteIdenticalAcrossThreadCounts) {
  ExperimentConfig a = small("fig6", "rerun_a");
  a.threads = 1;
  ExperimentConfig b = small("fig6", "rerun_b");
  b.threads = 4;
  const ExperimentResult ra = run_experiment(a), rb = run_experiment(b);
  ASSERT_EQ(ra.cells.size(), rb.cells.size());
  for (std::size_t i = 0; i < ra.cells.size(); ++i) {
    EXPECT_EQ(slurp(ra.cells[i].csv), slurp(rb.cells[i].csv)) << ra.cells[i].csv;
  }
  EXPECT_EQ(slurp(ra.index), slurp(rb.index));
}

TEST(Experiments, SeedChangesNoisyOutput) {
  ExperimentConfig a = small("fig4", "seed_a");
  a.seeds = {0};
  ExperimentConfig b = small("fig4", "seed_b");
  b.seeds = {1};
  EXPECT_NE(slurp(run_experiment(a).cells[0].csv), slurp(run_experiment(b).cells[0].csv));
}

TEST(Experiments, OverlayAddsOneBoundCurvePerCell) {
  ExperimentConfig c = small("fig7", "fig7");
  c.overlay = true;
  const ExperimentResult r = run_experiment(c);
  ASSERT_EQ(r.cells.size(), 6u);
  const std::string script = slurp(*r.plot_script);
  EXPECT_EQ(count_occurrences(script, "using 1:2"), 6);
  EXPECT_EQ(count_occurrences(script, "using 1:8"), 6);
  const std::string csv = slurp(r.cells[0].csv);
  EXPECT_EQ(csv.find(",,0\n"), std::string::npos);  // bound column is filled
}

TEST(Experiments, UnknownExperimentIsAConfigError) {
  ExperimentConfig c;
  c.experiment = "nope";
  EXPECT_THROW(run_experiment(c), ConfigError);
}

TEST(Plot, RejectsMissingOrForeignCsv) {
  const fs::path dir = scratch("plot");
  fs::create_directories(dir);
  EXPECT_THROW(emit_plot_script({dir / "missing.csv"}, {}, dir / "p.gp"), std::runtime_error);
  {
    std::ofstream out(dir / "foreign.csv");
    out << "a,b\n1,2\n";
  }
  EXPECT_THROW(emit_plot_script({dir / "foreign.csv"}, {}, dir / "p.gp"), std::runtime_error);
  {
    std::ofstream out(dir / "ok.csv");
    out << kCsvHeader << "\n0,1,1,,,,0,,0\n";
  }
  EXPECT_EQ(emit_plot_script({dir / "ok.csv"}, {}, dir / "p.gp"), 1);
  EXPECT_NE(slurp(dir / "p.gp").find("ok.csv"), std::string::npos);
}

TEST(Threshold, SolverNames) {
  EXPECT_EQ(parse_solver("stm2"), ThresholdSolver::Stm2);
  EXPECT_STREQ(to_string(ThresholdSolver::Tmm), "tmm");
  EXPECT_THROW(parse_solver("gd"), std::invalid_argument);
}

TEST(Threshold, TmmEmpiricalThresholdAboveAnalytic) {
  const auto inst = testbed::instance(testbed::spec::WorstCaseStronglyConvex{0.1, 100.0, 100},
                                      testbed::Coordinates::ErrorCentered);
  const double a = alpha_star_search(inst.problem, inst.x_start, ThresholdSolver::Tmm, 0.0, 1.0, 2000, {0, 1, 2});
  EXPECT_GE(a, tmm_alpha_threshold(100.0));
  EXPECT_LT(a, 1.0);
}

TEST(Threshold, StmToleratesMoreNoiseThanTmm) {
  const auto inst = testbed::instance(testbed::spec::WorstCaseStronglyConvex{0.1, 20.0, 100},
                                      testbed::Coordinates::ErrorCentered);
  const double tmm = alpha_star_search(inst.problem, inst.x_start, ThresholdSolver::Tmm, 0.0, 1.0, 2000, {0, 1, 2});
  double stm = 1.0;
  try {
    stm = alpha_star_search(inst.problem, inst.x_start, ThresholdSolver::Stm, 0.0, 1.0, 2000, {0, 1, 2});
  } catch (const NoThresholdInRange& e) {
    EXPECT_FALSE(e.diverges());
  }
  EXPECT_GT(stm, tmm);
}

TEST(Threshold, ReportsWhenNoTransitionInRange) {
  const auto inst = testbed::instance(testbed::spec::WorstCaseStronglyConvex{0.1, 100.0, 30},
                                      testbed::Coordinates::ErrorCentered);
  try {
    alpha_star_search(inst.problem, inst.x_start, ThresholdSolver::Tmm, 0.0, 0.01, 500, {0});
    FAIL() << "expected NoThresholdInRange";
  } catch (const NoThresholdInRange& e) {
    EXPECT_FALSE(e.diverges());
  }
  const DivergenceVote v = classify_alpha(inst.problem, inst.x_start, ThresholdSolver::Tmm, 0.95, 2000, {0, 1, 2});
  EXPECT_EQ(v.total, 3);
  EXPECT_TRUE(v.majority());
}

}  // namespace
}  // namespace iagm::tools
