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

#include "iagm/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "iagm/stm.hpp"

namespace iagm {
namespace {

class Recorder {
 public:
  Recorder(const Problem& problem, Trace& trace) : problem_(problem), trace_(trace), tracker_(problem) {
    trace_.reference_exact = tracker_.reference_exact();
  }

  bool record(long k, const Vector& x) {
    if (!all_finite(x) || x.norm() > kDivergenceNorm) return false;
    const double value = evaluate(problem_, x).total;
    if (!std::isfinite(value)) return false;
    TraceRecord r;
    r.k = k;
    r.f_value = value;
    r.f_gap = objective_gap(problem_, x);
    r.grad_norm = problem_.grad(x).norm();
    tracker_.observe(x, value, {});
    if (tracker_.reference_exact()) r.dist_to_opt = tracker_.dist_primary();
    r.r_tilde_k = tracker_.r_tilde();
    trace_.records.push_back(r);
    return true;
  }

 private:
  const Problem& problem_;
  Trace& trace_;
  DistanceTracker tracker_;
};

}  // namespace

Trace gd_run(const Problem& problem, const GradientOracle& oracle, double step,
             const Vector& x_start, long max_iters, RngStream& rng) {
  validate(problem);
  validate(oracle);
  if (!(step > 0.0)) throw std::invalid_argument("gd_run: step must be positive");
  if (max_iters < 0) throw std::invalid_argument("gd_run: max_iters must be >= 0");
  require_dim(x_start, problem.dim, "gd_run");
  Trace trace;
  trace.solver = "gd";
  Recorder rec(problem, trace);
  auto proj = [&](const Vector& v) {
    return problem.composite ? problem.composite->prox(v, step) : project(problem.feasible, v);
  };
  Vector x = x_start;
  if (!rec.record(0, x)) trace.status = RunStatus::Diverged;
  for (long k = 1; k <= max_iters && trace.status != RunStatus::Diverged; ++k) {
    x = proj(x - step * oracle_gradient(oracle, problem, x, rng));
    if (!rec.record(k, x)) trace.status = RunStatus::Diverged;
  }
  trace.final_point = x;
  return trace;
}

TmmParams tmm_params(double chi, double L_f) {
  if (!(chi > 1.0)) throw std::invalid_argument("tmm_params: chi must exceed 1");
  if (!(L_f > 0.0)) throw std::invalid_argument("tmm_params: L_f must be positive");
  TmmParams p;
  p.rho = 1.0 - 1.0 / std::sqrt(chi);
  const double r2 = p.rho * p.rho;
  p.step = (1.0 + p.rho) / L_f;
  p.beta = r2 / (2.0 - p.rho);
  p.gamma = r2 / ((1.0 + p.rho) * (2.0 - p.rho));
  p.delta_tm = r2 / (1.0 - r2);
  return p;
}

Trace tmm_run(const Problem& problem, const GradientOracle& oracle, const Vector& x_start,
              long max_iters, RngStream& rng) {
  validate(problem);
  validate(oracle);
  if (!(problem.mu > 0.0)) throw std::invalid_argument("tmm_run: requires mu > 0");
  if (!std::holds_alternative<Unconstrained>(problem.feasible) || problem.composite) {
    throw std::invalid_argument("tmm_run: requires an unconstrained smooth problem");
  }
  if (max_iters < 0) throw std::invalid_argument("tmm_run: max_iters must be >= 0");
  require_dim(x_start, problem.dim, "tmm_run");
  const TmmParams p = tmm_params(problem.lips / problem.mu, problem.lips);
  Trace trace;
  trace.solver = "tmm";
  Recorder rec(problem, trace);
  Vector xi_prev = x_start;
  Vector xi = x_start;
  if (!rec.record(0, x_start)) trace.status = RunStatus::Diverged;
  for (long k = 1; k <= max_iters && trace.status != RunStatus::Diverged; ++k) {
    const Vector y = (1.0 + p.gamma) * xi - p.gamma * xi_prev;
    Vector xi_next = (1.0 + p.beta) * xi - p.beta * xi_prev - p.step * oracle_gradient(oracle, problem, y, rng);
    xi_prev = std::move(xi);
    xi = std::move(xi_next);
    const Vector x = (1.0 + p.delta_tm) * xi - p.delta_tm * xi_prev;
    if (!rec.record(k, x)) trace.status = RunStatus::Diverged;
  }
  trace.final_point = (1.0 + p.delta_tm) * xi - p.delta_tm * xi_prev;
  return trace;
}

double tmm_alpha_threshold(double chi) {
  if (!(chi > 1.0)) throw std::invalid_argument("tmm_alpha_threshold: chi must exceed 1");
  const double s = std::sqrt(chi);
  return (s + 1.0) / (4.0 * chi - 3.0 * s + 1.0);
}

}  // namespace iagm
