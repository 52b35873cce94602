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


#include "iagm/tools/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "iagm/baselines.hpp"
#include "iagm/bounds.hpp"
#include "iagm/oracle.hpp"
#include "iagm/rng.hpp"
#include "iagm/stm.hpp"
#include "iagm/stm2.hpp"
#include "iagm/testbed.hpp"
#include "iagm/tools/plot.hpp"
#include "iagm/tools/threshold.hpp"

namespace iagm::tools {
namespace {

namespace fs = std::filesystem;
using testbed::Coordinates;

constexpr long kMaxIters = 50000;

struct Cell {
  std::string parameter;
  double value = 0.0;
  std::uint64_t seed = 0;
  std::function<Trace(RngStream&)> run;
};

struct Plan {
  std::vector<Cell> cells;
  /// Runs on the coordinator once every cell has finished.
  std::function<void(const std::vector<Trace>&, const fs::path&, ExperimentResult&)> summarize;
  /// Replaces cells entirely (threshold experiments).
  std::function<void(const fs::path&, ExperimentResult&, int threads)> custom;
  std::string title;
};

struct Defaults {
  std::vector<double> grid;
  long iters;
  int seeds;
};

const std::map<std::string, Defaults>& defaults_table() {
  static const std::map<std::string, Defaults> table = {
      {"fig3", {{0.0, 1e-3, 1e-2, 5e-2, 1e-1}, 50000, 1}},
      {"fig4", {{0.1, 0.2, 0.5, 1.0}, 10000, 1}},
      {"fig5", {{0.1, 0.5}, 10000, 1}},
      {"fig6", {{0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0}, 10000, 1}},
      {"fig7", {{0.5, 0.6, 0.7, 0.8, 0.9, 1.0}, 5000, 1}},
      {"fig8", {{1e-1, 1e-2, 1e-3, 1e-4}, kMaxIters, 30}},
      {"fig9", {{0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0}, 3000, 1}},
      {"fig10", {{}, 3000, 1}},  // grid derived from the admissible alpha
      {"fig11", {{10.0, 20.0, 50.0, 100.0}, 2000, 3}},
      {"fig12", {{10.0, 20.0, 50.0, 100.0}, 2000, 3}},
      {"gd-drift", {{1e-3}, 5000, 1}},
      {"stopping", {{32.0, 36.0}, kMaxIters, 10}},
      {"composite", {{0.0, 0.01}, 2000, 1}},
      {"stochastic", {{0.01, 0.1}, 2000, 30}},
      {"regularize", {{1e-1, 3e-2, 1e-2}, kMaxIters, 1}},
  };
  return table;
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

NoiseRadius radius_of(const ExperimentConfig& c) {
  return c.noise_radius && *c.noise_radius == "uniform" ? NoiseRadius::Uniform
                                                        : NoiseRadius::Sphere;
}

testbed::Instance convex_instance(const ExperimentConfig& c, Coordinates coords) {
  return testbed::instance(testbed::spec::WorstCaseConvex{*c.L_f, *c.k, *c.n}, coords);
}

testbed::Instance strongly_convex_instance(const ExperimentConfig& c, Coordinates coords,
                                           double chi) {
  return testbed::instance(testbed::spec::WorstCaseStronglyConvex{*c.mu, chi, *c.n}, coords);
}

using Overlay = std::function<std::optional<double>(const TraceRecord&)>;

void apply_overlay(Trace& trace, const Overlay& overlay) {
  if (!overlay) return;
  for (auto& r : trace.records) r.bound = overlay(r);
}

/// Single-solver run shared by the trace experiments.
Trace solve(const std::string& solver, const Problem& problem, const GradientOracle& oracle,
            int tau, long iters, const Vector& x_start, RngStream& rng) {
  if (solver == "stm") return run(problem, oracle, make_stm_params(problem, tau, iters), x_start, rng);
  if (solver == "stm2") return run2(problem, oracle, x_start, iters, rng);
  if (solver == "gd") return gd_run(problem, oracle, 1.0 / problem.lips, x_start, iters, rng);
  if (solver == "tmm") return tmm_run(problem, oracle, x_start, iters, rng);
  throw ConfigError("unknown solver '" + solver + "'");
}

Overlay convex_overlay(const Problem& p, double R, double delta) {
  return [L_f = p.lips, R, delta](const TraceRecord& r) -> std::optional<double> {
    if (r.k < 1) return std::nullopt;
    bounds::BoundInputs in;
    in.L_f = L_f;
    in.R = R;
    in.delta = delta;
    return bounds::thm47_bound_convex(in, r.k, r.r_tilde_k);
  };
}

Overlay strongly_convex_overlay(const Problem& p, double R, double delta, int tau) {
  return [L_f = p.lips, mu = p.mu, R, delta, tau](const TraceRecord& r) -> std::optional<double> {
    bounds::BoundInputs in;
    in.L_f = L_f;
    in.mu = mu;
    in.R = R;
    in.delta = delta;
    in.N = r.k;
    return bounds::thm47_bound(tau, in);
  };
}

/// Cells for a grid of oracles on one problem instance.
void add_grid(Plan& plan, const ExperimentConfig& c, const std::string& parameter,
              const std::shared_ptr<const testbed::Instance>& inst,
              const std::function<GradientOracle(double)>& make_oracle,
              const std::function<Overlay(double)>& make_overlay, int tau) {
  const std::string solver = c.solver.value_or("stm");
  const long iters = *c.iters;
  for (const auto seed : c.seeds) {
    for (const double v : c.grid) {
      const GradientOracle oracle = make_oracle(v);
      validate(oracle);
      Overlay overlay = c.overlay && make_overlay ? make_overlay(v) : Overlay{};
      plan.cells.push_back({parameter, v, seed,
                            [=](RngStream& rng) {
                              Trace t = solve(solver, inst->problem, oracle, tau, iters,
                                              inst->x_start, rng);
                              apply_overlay(t, overlay);
                              return t;
                            }});
    }
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Per-iteration mean of f_gap over the seeds of each parameter value.
void write_means(const std::vector<Cell>& cells, const std::vector<Trace>& traces,
                 const fs::path& dir, ExperimentResult& result) {
  std::map<double, std::vector<const Trace*>> groups;
  std::string parameter;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    groups[cells[i].value].push_back(&traces[i]);
    parameter = cells[i].parameter;
  }
  for (const auto& [value, group] : groups) {
    std::size_t rows = SIZE_MAX;
    for (const auto* t : group) rows = std::min(rows, t->records.size());
    std::ostringstream out;
    out << "iter,mean_f_gap,mean_bound,seeds\n";
    for (std::size_t r = 0; r < rows; ++r) {
      double gap = 0.0, bound = 0.0;
      bool has_bound = true;
      for (const auto* t : group) {
        gap += t->records[r].f_gap.value_or(NAN);
        if (t->records[r].bound) bound += *t->records[r].bound;
        else has_bound = false;
      }
      const double m = static_cast<double>(group.size());
      out << group.front()->records[r].k << "," << g17(gap / m) << ","
          << (has_bound ? g17(bound / m) : std::string()) << "," << group.size() << "\n";
    }
    const fs::path path = dir / ("mean_" + parameter + "_" + format_value(value) + ".csv");
    write_text(path, out.str());
    result.summaries.push_back(path);
  }
}


Plan plan_convex_absolute(const ExperimentConfig& c, const std::string& title) {
  Plan plan;
  plan.title = title;
  auto inst = std::make_shared<const testbed::Instance>(convex_instance(c, Coordinates::Original));
  const double R = inst->R;
  add_grid(
      plan, c, "delta", inst,
      [&](double d) { return GradientOracle(oracle::Absolute{d, radius_of(c)}); },
      [&](double d) { return convex_overlay(inst->problem, R, d); }, c.tau.value_or(1));
  return plan;
}

Plan plan_fig5(const ExperimentConfig& c) {
  Plan plan;
  plan.title = "absolute vs relative noise";
  auto inst = std::make_shared<const testbed::Instance>(convex_instance(c, Coordinates::Original));
  const double R = inst->R;
  add_grid(
      plan, c, "absolute", inst,
      [&](double d) { return GradientOracle(oracle::Absolute{d, radius_of(c)}); },
      [&](double d) { return convex_overlay(inst->problem, R, d); }, c.tau.value_or(1));
  add_grid(
      plan, c, "relative", inst,
      [&](double a) { return GradientOracle(oracle::Relative{a, radius_of(c)}); }, {},
      c.tau.value_or(1));
  return plan;
}

Plan plan_relative(const ExperimentConfig& c, bool strongly_convex, const std::string& title) {
  Plan plan;
  plan.title = title;
  auto inst = std::make_shared<const testbed::Instance>(
      strongly_convex ? strongly_convex_instance(c, Coordinates::ErrorCentered, *c.chi)
                      : convex_instance(c, Coordinates::ErrorCentered));
  add_grid(
      plan, c, "alpha", inst,
      [&](double a) { return GradientOracle(oracle::Relative{a, radius_of(c)}); }, {},
      c.tau.value_or(1));
  return plan;
}

Plan plan_fig7(const ExperimentConfig& c) {
  Plan plan;
  plan.title = "absolute noise, strongly convex";
  auto inst = std::make_shared<const testbed::Instance>(
      strongly_convex_instance(c, Coordinates::Original, *c.chi));
  const int tau = c.tau.value_or(2);
  const double R = inst->R;
  add_grid(
      plan, c, "delta", inst,
      [&](double d) { return GradientOracle(oracle::Absolute{d, radius_of(c)}); },
      [&](double d) { return strongly_convex_overlay(inst->problem, R, d, tau); }, tau);
  return plan;
}

Plan plan_fig8(const ExperimentConfig& c) {
  Plan plan;
  plan.title = "noise level and step count chosen for a target accuracy";
  auto inst = std::make_shared<const testbed::Instance>(
      strongly_convex_instance(c, Coordinates::Original, *c.chi));
  const int tau = c.tau.value_or(2);
  struct Row {
    double eps;
    bounds::Remark74Budget budget;
    long iters;
  };
  auto rows = std::make_shared<std::vector<Row>>();
  for (const double eps : c.grid) {
    const auto b = bounds::remark74_budget(eps, inst->problem.mu, inst->problem.lips, inst->R);
    rows->push_back({eps, b, std::min(b.N_min, *c.iters)});
  }
  for (const auto seed : c.seeds) {
    for (const auto& row : *rows) {
      const GradientOracle oracle = oracle::Absolute{row.budget.delta_max, radius_of(c)};
      Overlay overlay =
          c.overlay ? strongly_convex_overlay(inst->problem, inst->R, row.budget.delta_max, tau)
                    : Overlay{};
      const long iters = row.iters;
      plan.cells.push_back({"eps", row.eps, seed, [=](RngStream& rng) {
                              Trace t = run(inst->problem, oracle,
                                            make_stm_params(inst->problem, tau, iters),
                                            inst->x_start, rng);
                              apply_overlay(t, overlay);
                              return t;
                            }});
    }
  }
  plan.summarize = [rows, cells = plan.cells](const std::vector<Trace>& traces, const fs::path& dir,
                                              ExperimentResult& result) {
    std::ostringstream out;
    out << "eps,delta_max,N_min,iters,seeds,mean_final_gap,max_final_gap,reached\n";
    for (const auto& row : *rows) {
      double sum = 0.0, worst = 0.0;
      int count = 0;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].value != row.eps || traces[i].empty()) continue;
        const double gap = traces[i].back().f_gap.value_or(NAN);
        sum += gap;
        worst = std::max(worst, gap);
        ++count;
      }
      out << g17(row.eps) << "," << g17(row.budget.delta_max) << "," << row.budget.N_min << ","
          << row.iters << "," << count << "," << g17(sum / count) << "," << g17(worst) << ","
          << (worst <= row.eps ? 1 : 0) << "\n";
    }
    write_text(dir / "summary.csv", out.str());
    result.summaries.push_back(dir / "summary.csv");
    write_means(cells, traces, dir, result);
  };
  return plan;
}

Plan plan_fig10(const ExperimentConfig& c) {
  Plan plan;
  plan.title = "STM2, relative noise";
  auto inst = std::make_shared<const testbed::Instance>(
      strongly_convex_instance(c, Coordinates::ErrorCentered, *c.chi));
  const Problem& p = inst->problem;
  const double limit = max_alpha_relative(p.mu, p.lips);
  const double delta0 = *objective_gap(p, inst->x_start);
  ExperimentConfig cc = c;
  if (!cc.solver) cc.solver = "stm2";
  add_grid(
      plan, cc, "alpha", inst,
      [&](double a) { return GradientOracle(oracle::Relative{a, radius_of(c)}); },
      [&](double a) -> Overlay {
        if (a > limit) return {};
        return [L_f = p.lips, mu = p.mu, R = inst->R, delta0](const TraceRecord& r) {
          bounds::BoundInputs in;
          in.L_f = L_f;
          in.mu = mu;
          in.R = R;
          in.delta0 = delta0;
          return std::optional<double>(bounds::thm51_bound(in, r.k));
        };
      },
      1);
  return plan;
}

Plan plan_thresholds(const ExperimentConfig& c, ThresholdSolver accelerated) {
  Plan plan;
  plan.title = "alpha* against L";
  plan.custom = [c, accelerated](const fs::path& dir, ExperimentResult& result, int threads) {
    struct Job {
      double chi;
      ThresholdSolver solver;
      std::string verdict;
      std::optional<double> alpha_star;
    };
    std::vector<Job> jobs;
    for (const double chi : c.grid) {
      jobs.push_back({chi, accelerated, "", std::nullopt});
      jobs.push_back({chi, ThresholdSolver::Tmm, "", std::nullopt});
    }
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
      for (std::size_t i; (i = next++) < jobs.size();) {
        try {
          auto& job = jobs[i];
          const auto inst = strongly_convex_instance(c, Coordinates::ErrorCentered, job.chi);
          try {
            job.alpha_star = alpha_star_search(inst.problem, inst.x_start, job.solver, 0.0, 1.0,
                                               *c.iters, c.seeds);
            job.verdict = "bracketed";
          } catch (const NoThresholdInRange& e) {
            job.verdict = e.diverges() ? "diverges_on_range" : "converges_on_range";
          }
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);

    std::ostringstream out;
    out << "chi,L_f,mu,solver,verdict,alpha_star,alpha_lo,alpha_hi,tmm_analytic\n";
    for (const auto& job : jobs) {
      out << g17(job.chi) << "," << g17(*c.mu * job.chi) << "," << g17(*c.mu) << ","
          << to_string(job.solver) << "," << job.verdict << ","
          << (job.alpha_star ? g17(*job.alpha_star) : std::string()) << ",0,1,"
          << g17(tmm_alpha_threshold(job.chi)) << "\n";
    }
    write_text(dir / "thresholds.csv", out.str());
    result.summaries.push_back(dir / "thresholds.csv");
  };
  return plan;
}

Plan plan_gd_drift(const ExperimentConfig& c) {
  Plan plan;
  plan.title = "gradient descent under a constant bias";
  Vector lambdas(2);
  lambdas << *c.mu, *c.L_f;
  auto inst = std::make_shared<const testbed::Instance>(
      testbed::instance(testbed::spec::DiagonalQuadratic{lambdas}));
  const Vector x0 = Vector::Zero(2);
  const long iters = *c.iters;
  for (const auto seed : c.seeds) {
    for (const double d : c.grid) {
      Vector offset = Vector::Zero(2);
      offset[0] = -d;
      const GradientOracle oracle = oracle::Bias{offset};
      plan.cells.push_back({"delta", d, seed, [=](RngStream& rng) {
                              return gd_run(inst->problem, oracle, 1.0 / inst->problem.lips, x0,
                                            iters, rng);
                            }});
    }
  }
  plan.summarize = [c, cells = plan.cells](const std::vector<Trace>& traces, const fs::path& dir,
                                           ExperimentResult& result) {
    std::ostringstream out;
    out << "delta,mu,L_f,iters,x1_final,x1_closed_form,delta_over_mu\n";
    const double q = 1.0 - *c.mu / *c.L_f;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].seed != cells.front().seed) continue;
      const double d = cells[i].value;
      const long k = traces[i].back().k;
      const double closed = (d / *c.L_f) * -std::expm1(static_cast<double>(k) * std::log(q)) /
                            (*c.mu / *c.L_f);
      out << g17(d) << "," << g17(*c.mu) << "," << g17(*c.L_f) << "," << k << ","
          << g17(traces[i].final_point[0]) << "," << g17(closed) << "," << g17(d / *c.mu) << "\n";
    }
    write_text(dir / "drift.csv", out.str());
    result.summaries.push_back(dir / "drift.csv");
  };
  return plan;
}

struct StoppingSetup {
  double eps, delta, R, fstar;
  long N_max;
};

Plan plan_stopping(const ExperimentConfig& c) {
  Plan plan;
  plan.title = "early stopping";
  auto inst = std::make_shared<const testbed::Instance>(convex_instance(c, Coordinates::Original));
  const Problem& p = inst->problem;
  StoppingSetup s;
  const double L = 2.0 * p.lips;
  s.R = inst->R;
  s.fstar = *p.known_min;
  s.eps = 1e-2 * L * s.R * s.R;
  s.N_max = n_max(L, s.R, s.eps);
  s.delta = std::min(std::sqrt(L * s.eps / (3.0 * static_cast<double>(s.N_max + 1))),
                     s.eps / (9.0 * s.R));
  for (const double rule : c.grid) {
    if (rule != 32.0 && rule != 36.0) throw ConfigError("stopping: grid values must be 32 or 36");
  }
  for (const auto seed : c.seeds) {
    for (const double rule : c.grid) {
      const GradientOracle oracle = oracle::Absolute{s.delta, radius_of(c)};
      const StopRule stop_rule = rule == 32.0 ? StopRule(stop::KnownFstar{s.eps, s.R, s.fstar, s.delta})
                                              : StopRule(stop::Adaptive{s.eps, s.R, s.fstar, s.delta});
      Overlay overlay = c.overlay ? convex_overlay(p, s.R, s.delta) : Overlay{};
      const long iters = std::min(s.N_max, *c.iters);
      plan.cells.push_back({"rule", rule, seed, [=](RngStream& rng) {
                              Trace t = run(inst->problem, oracle,
                                            make_stm_params(inst->problem, 1, iters, stop_rule),
                                            inst->x_start, rng);
                              apply_overlay(t, overlay);
                              return t;
                            }});
    }
  }
  plan.summarize = [s, L, cells = plan.cells](const std::vector<Trace>& traces, const fs::path& dir,
                                              ExperimentResult& result) {
    const double certified =
        s.delta * s.delta / L * static_cast<double>(s.N_max + 1) + 3.0 * s.R * s.delta + s.eps;
    std::ostringstream out;
    out << "rule,seed,status,stop_k,N_max,delta,eps,certified_bound,final_gap\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& t = traces[i];
      out << cells[i].value << "," << cells[i].seed << "," << to_string(t.status) << ","
          << t.back().k << "," << s.N_max << "," << g17(s.delta) << "," << g17(s.eps) << ","
          << g17(certified) << "," << g17(t.back().f_gap.value_or(NAN)) << "\n";
    }
    write_text(dir / "stopping.csv", out.str());
    result.summaries.push_back(dir / "stopping.csv");
  };
  return plan;
}

Plan plan_composite(const ExperimentConfig& c) {
  Plan plan;
  plan.title = "l1-regularized logistic regression";
  RngStream data_rng(0);
  const auto data = testbed::synthetic_logreg_data(50, 10, data_rng);
  Problem p = testbed::logreg_l1(data.features, data.labels, 0.1);
  const Vector x0 = Vector::Zero(p.dim);
  p = testbed::with_reference_solution(std::move(p), x0);
  auto inst = std::make_shared<const testbed::Instance>(
      testbed::Instance{p, x0, (x0 - *p.known_argmin).norm()});
  const double R = inst->R;
  add_grid(
      plan, c, "delta", inst,
      [&](double d) { return GradientOracle(oracle::Absolute{d, radius_of(c)}); },
      [&](double d) { return convex_overlay(inst->problem, R, d); }, 1);
  return plan;
}

Plan plan_stochastic(const ExperimentConfig& c) {
  Plan plan;
  plan.title = "stochastic gradients";
  auto inst = std::make_shared<const testbed::Instance>(convex_instance(c, Coordinates::Original));
  const double R = inst->R;
  add_grid(
      plan, c, "delta", inst,
      [&](double d) { return GradientOracle(oracle::Stochastic{d}); },
      [&](double d) { return convex_overlay(inst->problem, R, d); }, 1);
  plan.summarize = [cells = plan.cells](const std::vector<Trace>& traces, const fs::path& dir,
                                        ExperimentResult& result) {
    write_means(cells, traces, dir, result);
  };
  return plan;
}

Plan plan_regularize(const ExperimentConfig& c) {
  Plan plan;
  plan.title = "regularized convex problem";
  auto inst = std::make_shared<const testbed::Instance>(convex_instance(c, Coordinates::Original));
  for (const auto seed : c.seeds) {
    for (const double eps : c.grid) {
      const auto b = bounds::remark75_budget(eps, inst->problem.lips, inst->R);
      const GradientOracle oracle = oracle::Absolute{b.delta_max, radius_of(c)};
      const long iters = std::min(b.N_min, *c.iters);
      const bool overlay = c.overlay;
      plan.cells.push_back({"eps", eps, seed, [=](RngStream& rng) {
                              auto r = solve_regularized(inst->problem, oracle, eps, inst->R,
                                                         inst->x_start, iters, rng);
                              if (overlay) {
                                apply_overlay(r.trace, [&](const TraceRecord& rec) {
                                  return std::optional<double>(bounds::regularized_bound(
                                      inst->problem.lips, r.mu, inst->R, b.delta_max, rec.k));
                                });
                              }
                              return r.trace;
                            }});
    }
  }
  return plan;
}

Plan build_plan(const ExperimentConfig& c) {
  const std::string& e = c.experiment;
  if (e == "fig3") return plan_convex_absolute(c, "absolute noise, convex");
  if (e == "fig4") return plan_convex_absolute(c, "large absolute noise, convex");
  if (e == "fig5") return plan_fig5(c);
  if (e == "fig6") return plan_relative(c, false, "relative noise, convex");
  if (e == "fig7") return plan_fig7(c);
  if (e == "fig8") return plan_fig8(c);
  if (e == "fig9") return plan_relative(c, true, "relative noise, strongly convex");
  if (e == "fig10") return plan_fig10(c);
  if (e == "fig11") return plan_thresholds(c, ThresholdSolver::Stm);
  if (e == "fig12") return plan_thresholds(c, ThresholdSolver::Stm2);
  if (e == "gd-drift") return plan_gd_drift(c);
  if (e == "stopping") return plan_stopping(c);
  if (e == "composite") return plan_composite(c);
  if (e == "stochastic") return plan_stochastic(c);
  if (e == "regularize") return plan_regularize(c);
  throw ConfigError("unknown experiment '" + e + "'");
}

std::string cell_stem(const Cell& cell) {
  return cell.parameter + "_" + format_value(cell.value) + "_seed" + std::to_string(cell.seed);
}

}  // namespace

bool ExperimentResult::divergence_only() const {
  if (cells.empty()) return false;
  return std::all_of(cells.begin(), cells.end(),
                     [](const CellOutput& c) { return c.status == RunStatus::Diverged; });
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12",
      "gd-drift", "stopping", "composite", "stochastic", "regularize"};
  return names;
}

bool is_registered(const std::string& name) { return defaults_table().count(name) > 0; }

ExperimentConfig resolve(const ExperimentConfig& config) {
  if (!is_registered(config.experiment)) {
    throw ConfigError("unknown experiment '" + config.experiment + "'");
  }
  const Defaults& d = defaults_table().at(config.experiment);
  ExperimentConfig c = config;
  if (c.seeds.empty()) {
    for (int s = 0; s < d.seeds; ++s) c.seeds.push_back(static_cast<std::uint64_t>(s));
  }
  if (!c.iters) c.iters = d.iters;
  if (*c.iters < 1 || *c.iters > kMaxIters) {
    throw ConfigError("iters must lie in [1, " + std::to_string(kMaxIters) + "]");
  }
  if (!c.n) c.n = 100;
  if (!c.k) c.k = 50;
  if (!c.L_f) c.L_f = 1.0;
  if (!c.mu) c.mu = c.experiment == "gd-drift" ? 0.01 : 0.1;
  if (!c.chi) c.chi = 100.0;
  if (c.tau && *c.tau != 1 && *c.tau != 2) throw ConfigError("tau must be 1 or 2");
  if (c.noise_radius && *c.noise_radius != "sphere" && *c.noise_radius != "uniform") {
    throw ConfigError("noise_radius must be 'sphere' or 'uniform'");
  }
  if (c.solver && *c.solver != "stm" && *c.solver != "stm2" && *c.solver != "gd" &&
      *c.solver != "tmm") {
    throw ConfigError("solver must be one of stm, stm2, gd, tmm");
  }
  if (c.threads < 0) throw ConfigError("threads must be >= 0");
  if (c.grid.empty()) {
    c.grid = d.grid;
    if (c.experiment == "fig10") {
      const double limit = max_alpha_relative(*c.mu, *c.mu * *c.chi);
      c.grid = {0.0, 0.5 * limit, limit, 10.0 * limit, 100.0 * limit};
    }
  }
  return c;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const ExperimentConfig c = resolve(config);
  ExperimentResult result;
  result.experiment = c.experiment;
  result.dir = c.out / c.experiment;
  std::error_code ec;
  fs::create_directories(result.dir, ec);
  if (ec || !fs::is_directory(result.dir)) {
    throw std::runtime_error("unwritable output path " + result.dir.string());
  }

  Plan plan;
  try {
    plan = build_plan(c);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const int threads = c.threads > 0 ? c.threads
                                    : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  if (plan.custom) {
    plan.custom(result.dir, result, threads);
  } else {
    std::vector<Trace> traces(plan.cells.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
      for (std::size_t i; (i = next++) < plan.cells.size();) {
        try {
          const Cell& cell = plan.cells[i];
          RngStream rng = RngStream(cell.seed).fork(
              fnv1a(cell.parameter + "=" + format_value(cell.value)));
          traces[i] = cell.run(rng);
          write_text(result.dir / (cell_stem(cell) + ".csv"), to_csv(traces[i]));
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    const int n_threads = std::min<int>(threads, static_cast<int>(plan.cells.size()));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);

    for (std::size_t i = 0; i < plan.cells.size(); ++i) {
      const Cell& cell = plan.cells[i];
      result.cells.push_back({result.dir / (cell_stem(cell) + ".csv"), cell.parameter, cell.value,
                              cell.seed, traces[i].status, traces[i].records.size()});
    }
    if (plan.summarize) plan.summarize(traces, result.dir, result);

    std::vector<fs::path> plotted;
    PlotStyle style;
    style.title = plan.title;
    for (const auto& cell : result.cells) {
      if (cell.seed == c.seeds.front()) {
        plotted.push_back(cell.csv);
        style.labels.push_back(cell.parameter + "=" + format_value(cell.value));
      }
    }
    result.plot_script = result.dir / "plot.gp";
    emit_plot_script(plotted, style, *result.plot_script);
  }

  std::ostringstream index;
  index << "file,parameter,value,seed,status,rows\n";
  for (const auto& cell : result.cells) {
    index << cell.csv.filename().string() << "," << cell.parameter << "," << g17(cell.value)
          << "," << cell.seed << "," << to_string(cell.status) << "," << cell.rows << "\n";
  }
  for (const auto& s : result.summaries) index << s.filename().string() << ",summary,,,,\n";
  result.index = result.dir / "index.csv";
  write_text(result.index, index.str());
  write_text(result.dir / "config.json", to_json(c) + "\n");
  return result;
}

}  // namespace iagm::tools
