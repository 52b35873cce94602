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

#include "iagm/stm2.hpp"

#include <cmath>
#include <stdexcept>

#include "iagm/stm.hpp"

namespace iagm {
namespace {

constexpr double kRescaleAbove = 1e150;
constexpr double kRescaleFactor = 1e-150;

double scaled_to_true(double v, double log_scale) {
  if (v == 0.0) return 0.0;
  const long double l = std::log(static_cast<long double>(v)) - static_cast<long double>(log_scale);
  return static_cast<double>(std::exp(l));
}

void require_stm2_problem(const Problem& problem) {
  if (!(problem.mu > 0.0)) throw std::invalid_argument("stm2: requires mu > 0");
  if (!std::holds_alternative<Unconstrained>(problem.feasible) || problem.composite) {
    throw std::invalid_argument("stm2: requires an unconstrained smooth problem");
  }
}

}  // namespace

double Stm2State::true_A() const { return scaled_to_true(A, log_scale); }
double Stm2State::true_alpha() const { return scaled_to_true(alpha, log_scale); }

Stm2State stm2_init(const Problem& problem, const Vector& x_start) {
  require_stm2_problem(problem);
  require_dim(x_start, problem.dim, "stm2_init");
  Stm2State s;
  s.L = 2.0 * problem.lips;
  s.mu2 = 0.5 * problem.mu;
  s.A = s.alpha = 1.0 / s.L;
  s.y = s.u = s.x = x_start;
  s.last_grad = Vector::Zero(problem.dim);
  return s;
}

Vector stm2_u_update(const Vector& u_prev, const Vector& y, const Vector& g, double A_prev,
                     double alpha, double mu2, double weight) {
  const double c_prev = weight + mu2 * A_prev;
  const double c = weight + mu2 * (A_prev + alpha);
  return (c_prev * u_prev + (mu2 * alpha) * y - alpha * g) / c;
}

Stm2State stm2_step(Stm2State s, const Problem& problem, const GradientOracle& oracle,
                    RngStream& rng) {
  const double A_prev = s.A;
  const double alpha = solve_alpha_scaled(A_prev, s.mu2, s.L, s.anchor_weight);
  const double A = A_prev + alpha;
  s.y = (A_prev * s.x + alpha * s.u) / A;
  s.last_grad = oracle_gradient(oracle, problem, s.y, rng);
  s.u = stm2_u_update(s.u, s.y, s.last_grad, A_prev, alpha, s.mu2, s.anchor_weight);
  s.x = (A_prev * s.x + alpha * s.u) / A;
  s.A = A;
  s.alpha = alpha;
  s.k += 1;
  if (s.A > kRescaleAbove) {
    s.A *= kRescaleFactor;
    s.alpha *= kRescaleFactor;
    s.anchor_weight *= kRescaleFactor;
    s.log_scale += std::log(kRescaleFactor);
  }
  return s;
}

Trace run2(const Problem& problem, const GradientOracle& oracle, const Vector& x_start,
           long max_iters, RngStream& rng, const Stm2Observer& observer) {
  validate(problem);
  validate(oracle);
  if (max_iters < 0) throw std::invalid_argument("run2: max_iters must be >= 0");
  Trace trace;
  trace.solver = "stm2";
  DistanceTracker tracker(problem);
  trace.reference_exact = tracker.reference_exact();

  auto record = [&](const Stm2State& s) {
    if (!all_finite(s.y) || !all_finite(s.u) || !all_finite(s.x) || s.y.norm() > kDivergenceNorm) {
      return false;
    }
    const double value = evaluate(problem, s.y).total;
    if (!std::isfinite(value)) return false;
    TraceRecord r;
    r.k = s.k;
    r.f_value = value;
    r.f_gap = objective_gap(problem, s.y);
    r.grad_norm = problem.grad(s.y).norm();
    tracker.observe(s.y, value, {&s.u, &s.x});
    if (tracker.reference_exact()) r.dist_to_opt = tracker.dist_primary();
    r.A_k = s.true_A();
    r.alpha_k = s.true_alpha();
    r.r_tilde_k = tracker.r_tilde();
    trace.records.push_back(r);
    return true;
  };

  Stm2State s = stm2_init(problem, x_start);
  if (!record(s)) trace.status = RunStatus::Diverged;
  while (trace.status != RunStatus::Diverged && s.k < max_iters) {
    Stm2State next = stm2_step(s, problem, oracle, rng);
    if (observer) observer(s, next);
    s = std::move(next);
    if (!record(s)) trace.status = RunStatus::Diverged;
  }
  trace.final_point = s.y;
  return trace;
}

double max_alpha_relative(double mu, double L_f) {
  if (!(mu > 0.0)) throw std::invalid_argument("max_alpha_relative: mu must be positive");
  if (!(L_f >= mu)) throw std::invalid_argument("max_alpha_relative: requires mu <= L_f");
  return mu / (28.0 * L_f);
}

}  // namespace iagm
