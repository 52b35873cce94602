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


// iagm: experiment runner, threshold search and bound calculator.
//
//   iagm run fig7 --overlay --out results
//   iagm threshold --solver tmm --chi 100 --lo 0 --hi 1
//   iagm bounds thm47 --L_f 10 --mu 0.1 --R 3 --delta 0.5 --N 100 --tau 2

#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "iagm/baselines.hpp"
#include "iagm/bounds.hpp"
#include "iagm/stm.hpp"
#include "iagm/stm2.hpp"
#include "iagm/testbed.hpp"
#include "iagm/tools/config.hpp"
#include "iagm/tools/experiments.hpp"
#include "iagm/tools/threshold.hpp"

namespace {

using nlohmann::json;
using namespace iagm;
using namespace iagm::tools;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitDiverged = 2;

struct BoundArgs {
  bounds::BoundInputs in;
  int tau = 1;
  long k = 0;
  double chi = 0.0;
  double L = 0.0;
  double R_star = 0.0;
  double eps0 = 0.0;
  double mu_reg = 0.0;
};

json evaluate_bound(const std::string& name, const BoundArgs& a) {
  static const std::map<std::string, std::function<json(const BoundArgs&)>> table = {
      {"thm47", [](const BoundArgs& b) { return json(bounds::thm47_bound(b.tau, b.in)); }},
      {"thm47-floor", [](const BoundArgs& b) { return json(bounds::thm47_floor(b.tau, b.in)); }},
      {"thm47-convex",
       [](const BoundArgs& b) { return json(bounds::thm47_bound_convex(b.in, b.in.N, b.in.r_tilde_N)); }},
      {"convex-horizon", [](const BoundArgs& b) { return json(bounds::convex_optimal_horizon(b.in)); }},
      {"thm51", [](const BoundArgs& b) { return json(bounds::thm51_bound(b.in, b.k)); }},
      {"envelope38", [](const BoundArgs& b) { return json(bounds::envelope38(b.in, b.k)); }},
      {"chain38", [](const BoundArgs& b) { return json(bounds::chain38_holds(b.in)); }},
      {"growth",
       [](const BoundArgs& b) { return json(bounds::growth_factor(b.in.mu_tau(b.tau), b.in.L())); }},
      {"remark73",
       [](const BoundArgs& b) {
         return json(bounds::remark73_crossover(b.in.mu, b.in.L_f, b.in.r_tilde_N));
       }},
      {"remark73-display",
       [](const BoundArgs& b) {
         return json(bounds::remark73_crossover_display(b.in.mu, b.in.L_f, b.in.r_tilde_N));
       }},
      {"remark74",
       [](const BoundArgs& b) {
         const auto r = bounds::remark74_budget(b.in.eps, b.in.mu, b.in.L_f, b.in.R);
         return json{{"delta_max", r.delta_max}, {"N_min", r.N_min}};
       }},
      {"remark75",
       [](const BoundArgs& b) {
         const auto r = bounds::remark75_budget(b.in.eps, b.L, b.in.R);
         return json{{"mu", r.mu}, {"delta_max", r.delta_max}, {"N_min", r.N_min}};
       }},
      {"remark76",
       [](const BoundArgs& b) {
         const auto r = bounds::remark76_budget(b.eps0, b.L, b.R_star);
         return json{{"eps", r.eps}, {"zeta", r.zeta}, {"delta_max", r.delta_max},
                     {"N_eps0", r.N_eps0}};
       }},
      {"regularized",
       [](const BoundArgs& b) {
         return json(bounds::regularized_bound(b.in.L_f, b.mu_reg, b.in.R, b.in.delta, b.k));
       }},
      {"n-max", [](const BoundArgs& b) { return json(n_max(b.L, b.in.R, b.in.eps)); }},
      {"tmm-threshold", [](const BoundArgs& b) { return json(tmm_alpha_threshold(b.chi)); }},
      {"max-alpha-relative",
       [](const BoundArgs& b) { return json(max_alpha_relative(b.in.mu, b.in.L_f)); }},
  };
  const auto it = table.find(name);
  if (it == table.end()) {
    std::string known;
    for (const auto& [k, v] : table) known += (known.empty() ? "" : ", ") + k;
    throw ConfigError("unknown bound '" + name + "' (known: " + known + ")");
  }
  return it->second(a);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accelerated methods with inexact gradients: experiments and bounds"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "Run a registered experiment");
  std::string experiment;
  std::string config_path;
  ExperimentConfig flags;
  long iters = 0;
  std::string out_dir;
  int n = 0, k = 0, tau = 0;
  double L_f = 0.0, mu = 0.0, chi = 0.0;
  std::string solver, noise_radius;
  run_cmd->add_option("experiment", experiment, "Experiment name")->required();
  run_cmd->add_option("--config", config_path, "Flat JSON config file")->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", flags.seeds, "Seeds (repeatable)");
  run_cmd->add_option("--iters", iters, "Iteration budget");
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_flag("--overlay", flags.overlay, "Add the theoretical bound column");
  run_cmd->add_option("--grid", flags.grid, "Parameter values");
  run_cmd->add_option("--n", n, "Dimension");
  run_cmd->add_option("--k", k, "Chain length of the convex worst case");
  run_cmd->add_option("--L_f", L_f, "Smoothness constant");
  run_cmd->add_option("--mu", mu, "Strong convexity");
  run_cmd->add_option("--chi", chi, "Condition number");
  run_cmd->add_option("--tau", tau, "Oracle model (1 or 2)");
  run_cmd->add_option("--solver", solver, "stm, stm2, gd or tmm");
  run_cmd->add_option("--noise-radius", noise_radius, "sphere or uniform");
  run_cmd->add_option("--threads", flags.threads, "Worker threads (0: all cores)");

  // threshold
  auto* thr_cmd = app.add_subcommand("threshold", "Bisect the relative-noise threshold alpha*");
  std::string thr_solver = "stm";
  double thr_chi = 0.0, thr_mu = 0.1, thr_lo = 0.0, thr_hi = 1.0;
  long thr_budget = 20000;
  int thr_n = 100, thr_k = 50;
  std::vector<std::uint64_t> thr_seeds = {0, 1, 2, 3, 4};
  thr_cmd->add_option("--solver", thr_solver, "stm, stm2 or tmm")
      ->check(CLI::IsMember({"stm", "stm2", "tmm"}));
  thr_cmd->add_option("--chi", thr_chi, "Condition number; 0 selects the convex worst case");
  thr_cmd->add_option("--mu", thr_mu, "Strong convexity");
  thr_cmd->add_option("--lo", thr_lo, "Lower end of the bracket");
  thr_cmd->add_option("--hi", thr_hi, "Upper end of the bracket");
  thr_cmd->add_option("--budget", thr_budget, "Iterations per run");
  thr_cmd->add_option("--n", thr_n, "Dimension");
  thr_cmd->add_option("--k", thr_k, "Chain length (convex case)");
  thr_cmd->add_option("--seed", thr_seeds, "Seeds voting on divergence");

  // bounds
  auto* bnd_cmd = app.add_subcommand("bounds", "Evaluate a bound or budget formula");
  std::string bound_name;
  BoundArgs ba;
  bnd_cmd->add_option("name", bound_name, "Formula name")->required();
  bnd_cmd->add_option("--L_f", ba.in.L_f);
  bnd_cmd->add_option("--mu", ba.in.mu);
  bnd_cmd->add_option("--R", ba.in.R);
  bnd_cmd->add_option("--delta", ba.in.delta);
  bnd_cmd->add_option("--alpha", ba.in.alpha);
  bnd_cmd->add_option("--eps", ba.in.eps);
  bnd_cmd->add_option("--N", ba.in.N);
  bnd_cmd->add_option("--r_tilde", ba.in.r_tilde_N);
  bnd_cmd->add_option("--delta0", ba.in.delta0);
  bnd_cmd->add_option("--tau", ba.tau);
  bnd_cmd->add_option("--k", ba.k);
  bnd_cmd->add_option("--chi", ba.chi);
  bnd_cmd->add_option("--L", ba.L);
  bnd_cmd->add_option("--R_star", ba.R_star);
  bnd_cmd->add_option("--eps0", ba.eps0);
  bnd_cmd->add_option("--mu_reg", ba.mu_reg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) {
      ExperimentConfig config;
      if (!config_path.empty()) config = load_config(config_path);
      flags.experiment = experiment;
      if (run_cmd->count("--iters")) flags.iters = iters;
      if (run_cmd->count("--out")) flags.out = out_dir;
      if (run_cmd->count("--n")) flags.n = n;
      if (run_cmd->count("--k")) flags.k = k;
      if (run_cmd->count("--L_f")) flags.L_f = L_f;
      if (run_cmd->count("--mu")) flags.mu = mu;
      if (run_cmd->count("--chi")) flags.chi = chi;
      if (run_cmd->count("--tau")) flags.tau = tau;
      if (run_cmd->count("--solver")) flags.solver = solver;
      if (run_cmd->count("--noise-radius")) flags.noise_radius = noise_radius;
      merge_config(config, flags);
      const auto result = run_experiment(config);
      std::cout << "wrote " << result.cells.size() << " runs to " << result.dir.string() << "\n";
      for (const auto& s : result.summaries) std::cout << "  " << s.string() << "\n";
      if (result.plot_script) std::cout << "  " << result.plot_script->string() << "\n";
      return result.divergence_only() ? kExitDiverged : kExitOk;
    }

    if (*thr_cmd) {
      const auto s = parse_solver(thr_solver);
      const auto inst =
          thr_chi > 0.0
              ? testbed::instance(testbed::spec::WorstCaseStronglyConvex{thr_mu, thr_chi, thr_n},
                                  testbed::Coordinates::ErrorCentered)
              : testbed::instance(testbed::spec::WorstCaseConvex{1.0, thr_k, thr_n},
                                  testbed::Coordinates::ErrorCentered);
      try {
        const double a = alpha_star_search(inst.problem, inst.x_start, s, thr_lo, thr_hi,
                                           thr_budget, thr_seeds);
        std::printf("alpha_star %.6g\n", a);
        if (thr_chi > 0.0) std::printf("tmm_analytic %.6g\n", tmm_alpha_threshold(thr_chi));
        return kExitOk;
      } catch (const NoThresholdInRange& e) {
        std::printf("%s\n", e.what());
        return e.diverges() ? kExitDiverged : kExitOk;
      }
    }

    if (*bnd_cmd) {
      std::cout << json{{"name", bound_name}, {"value", evaluate_bound(bound_name, ba)}}.dump()
                << "\n";
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
