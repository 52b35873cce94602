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

#include "iagm/stm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <type_traits>

#include "iagm/bounds.hpp"

namespace iagm {
namespace {

constexpr double kRescaleAbove = 1e150;
constexpr double kRescaleFactor = 1e-150;

double scaled_to_true(double v, double log_scale) {
  if (v == 0.0) return 0.0;
  const long double l = std::log(static_cast<long double>(v)) - static_cast<long double>(log_scale);
  return static_cast<double>(std::exp(l));
}

struct PsiParts {
  double value = 0.0;
  double magnitude = 0.0;
};

// s * psi_k(x) together with the sum of absolute values of its terms, which
// sets the rounding scale of comparisons between psi values.
PsiParts psi_parts(const StmState& s, double mu, const Problem& problem, const Vector& x) {
  const double quad = 0.5 * s.anchor_weight * (x - s.x_tilde0).squaredNorm();
  const double lin = s.acc_grad.dot(x);
  PsiParts p;
  p.value = quad + s.acc_f - s.acc_inner + lin;
  p.magnitude = quad + std::abs(s.acc_f) + std::abs(s.acc_inner) + std::abs(lin);
  if (mu > 0.0) {
    const double xx = x.squaredNorm();
    const double px = s.acc_point.dot(x);
    p.value += 0.5 * mu * (s.A * xx - 2.0 * px + s.acc_sq);
    p.magnitude += 0.5 * mu * (s.A * xx + 2.0 * std::abs(px) + s.acc_sq);
  }
  if (problem.composite) {
    const double r = s.A * problem.composite->value(x);
    p.value += r;
    p.magnitude += std::abs(r);
  }
  return p;
}

void check_params(const StmParams& params) {
  if (!(params.L > 0.0)) throw std::invalid_argument("stm: L must be positive");
  if (!(params.mu_tau >= 0.0)) throw std::invalid_argument("stm: mu_tau must be >= 0");
  if (params.tau != 1 && params.tau != 2) throw std::invalid_argument("stm: tau must be 1 or 2");
  if (params.tau == 2 && !(params.mu_tau > 0.0)) {
    throw std::invalid_argument("stm: tau = 2 requires mu > 0");
  }
  if (params.max_iters < 0) throw std::invalid_argument("stm: max_iters must be >= 0");
}

void rescale(StmState& s) {
  if (!(s.A > kRescaleAbove)) return;
  const double f = kRescaleFactor;
  s.A *= f;
  s.alpha *= f;
  s.anchor_weight *= f;
  s.acc_grad *= f;
  s.acc_point *= f;
  s.acc_f *= f;
  s.acc_inner *= f;
  s.acc_sq *= f;
  s.sum_cross *= f;
  s.sum_A *= f;
  s.log_scale += std::log(f);
}

bool stop_test(double value, const StmState& state, const StmParams& params, double fstar,
               double R, double eps, double delta, bool adaptive) {
  const double d2 = delta * delta / params.L;
  double rhs = d2 * state.sum_A / state.A + eps;
  if (adaptive) {
    rhs += R * delta + delta * state.sum_cross / state.A;
  } else {
    rhs += 3.0 * R * delta;
  }
  return value - fstar <= rhs;
}

struct ResolvedStop {
  bool active = false;
  bool adaptive = false;
  double eps = 0.0;
  double R = 0.0;
  double fstar = 0.0;
  double delta = 0.0;
};

ResolvedStop resolve_stop(const StopRule& rule, const GradientOracle& oracle) {
  ResolvedStop out;
  auto fill = [&](const auto& r, bool adaptive) {
    if (!(r.eps > 0.0) || !(r.R > 0.0)) throw std::invalid_argument("stop rule: eps and R must be positive");
    out.active = true;
    out.adaptive = adaptive;
    out.eps = r.eps;
    out.R = r.R;
    out.fstar = r.fstar;
    if (r.delta) {
      out.delta = *r.delta;
    } else if (auto b = noise_bound(oracle)) {
      out.delta = *b;
    } else {
      throw std::invalid_argument("stop rule: the oracle has no uniform noise bound; set delta");
    }
  };
  if (const auto* k = std::get_if<stop::KnownFstar>(&rule)) fill(*k, false);
  if (const auto* a = std::get_if<stop::Adaptive>(&rule)) fill(*a, true);
  return out;
}

bool state_finite(const StmState& s) {
  return std::isfinite(s.f_x) && all_finite(s.x) && all_finite(s.z) && all_finite(s.x_tilde) &&
         s.x.norm() <= kDivergenceNorm;
}

Trace run_impl(const Problem& solve_on, const Problem& report, bool same,
               const GradientOracle& oracle, const StmParams& params, const Vector& x_start,
               RngStream& rng, const StmObserver& observer) {
  validate(solve_on);
  validate(oracle);
  check_params(params);
  require_dim(x_start, solve_on.dim, "stm run");
  require_dim(x_start, report.dim, "stm run (report)");
  const ResolvedStop rule = resolve_stop(params.stop, oracle);
  const double eps_widen = 2.0 * value_noise(oracle);
  RngStream value_rng = rng.fork(0x73746f70ULL);

  Trace trace;
  trace.solver = "stm";
  DistanceTracker tracker(report);
  trace.reference_exact = tracker.reference_exact();

  StepCertificate cert;
  StepCertificate* cert_ptr = observer ? &cert : nullptr;

  auto record = [&](const StmState& s) {
    if (!state_finite(s)) return false;
    const double value = same ? s.f_x : evaluate(report, s.x).total;
    if (!std::isfinite(value)) return false;
    TraceRecord r;
    r.k = s.k;
    r.f_value = value;
    if (report.gap) {
      r.f_gap = report.gap(s.x);
    } else if (report.known_min) {
      r.f_gap = value - *report.known_min;
    }
    r.grad_norm = report.grad(s.x).norm();
    tracker.observe(s.x, value, {&s.z, &s.x_tilde});
    if (tracker.reference_exact()) r.dist_to_opt = tracker.dist_primary();
    r.A_k = s.true_A();
    r.alpha_k = s.true_alpha();
    r.r_tilde_k = tracker.r_tilde();
    trace.records.push_back(r);
    return true;
  };
  auto should_stop = [&](const StmState& s) {
    if (!rule.active) return false;
    const double value =
        eps_widen > 0.0 ? observed_value(oracle, solve_on, s.x, value_rng) : s.f_x;
    return stop_test(value, s, params, rule.fstar, rule.R, rule.eps + eps_widen, rule.delta,
                     rule.adaptive);
  };

  StmState s = stm_init(solve_on, oracle, params, x_start, rng, cert_ptr);
  while (true) {
    if (!record(s)) {
      trace.status = RunStatus::Diverged;
      break;
    }
    if (observer) observer(s, cert);
    if (should_stop(s)) {
      trace.records.back().stopped = true;
      trace.status = RunStatus::Stopped;
      break;
    }
    if (s.k >= params.max_iters) break;
    s = stm_step(std::move(s), params, solve_on, oracle, rng, cert_ptr);
  }
  trace.final_point = s.x;
  return trace;
}

}  // namespace

double StmState::true_A() const { return scaled_to_true(A, log_scale); }
double StmState::true_alpha() const { return scaled_to_true(alpha, log_scale); }

StmParams make_stm_params(const Problem& problem, int tau, long max_iters, StopRule stop,
                          std::optional<double> mu_override) {
  const double mu = mu_override.value_or(problem.mu);
  if (tau != 1 && tau != 2) throw std::invalid_argument("make_stm_params: tau must be 1 or 2");
  if (tau == 2 && !(mu > 0.0)) throw std::invalid_argument("make_stm_params: tau = 2 requires mu > 0");
  if (mu < 0.0 || mu > problem.mu) throw std::invalid_argument("make_stm_params: mu must lie in [0, problem mu]");
  StmParams p;
  p.L = 2.0 * problem.lips;
  p.mu_tau = tau == 2 ? 0.5 * mu : mu;
  p.tau = tau;
  p.max_iters = max_iters;
  p.stop = std::move(stop);
  return p;
}

int choose_tau(const Problem& problem, double delta, double r_tilde) {
  if (!(problem.mu > 0.0)) return 1;
  return delta < bounds::remark73_crossover(problem.mu, problem.lips, r_tilde) ? 2 : 1;
}

double solve_alpha(double A_prev, double mu_tau, double L) {
  return solve_alpha_scaled(A_prev, mu_tau, L, 1.0);
}

double solve_alpha_scaled(double A_prev, double mu_tau, double L, double weight) {
  const double c = weight + mu_tau * A_prev;
  const double h = c / (2.0 * L);
  return h + std::sqrt(h * h + A_prev * c / L);
}

Vector psi_center(const StmState& state, const StmParams& params) {
  const double mu = params.mu_tau;
  Vector num = state.anchor_weight * state.x_tilde0 - state.acc_grad;
  if (mu > 0.0) num += mu * state.acc_point;
  return num / (state.anchor_weight + mu * state.A);
}

Vector argmin_psi(const StmState& state, const StmParams& params, const Problem& problem) {
  const Vector c = psi_center(state, params);
  if (problem.composite) {
    const double t = state.A / (state.anchor_weight + params.mu_tau * state.A);
    return problem.composite->prox(c, t);
  }
  return project(problem.feasible, c);
}

double evaluate_psi_scaled(const StmState& state, const StmParams& params, const Problem& problem,
                           const Vector& x) {
  require_dim(x, problem.dim, "evaluate_psi");
  return psi_parts(state, params.mu_tau, problem, x).value;
}

double evaluate_psi(const StmState& state, const StmParams& params, const Problem& problem,
                    const Vector& x) {
  const long double v = evaluate_psi_scaled(state, params, problem, x);
  return static_cast<double>(v * std::exp(-static_cast<long double>(state.log_scale)));
}

StmState stm_init(const Problem& problem, const GradientOracle& oracle, const StmParams& params,
                  const Vector& x_start, RngStream& rng, StepCertificate* cert) {
  check_params(params);
  require_dim(x_start, problem.dim, "stm_init");
  StmState s;
  s.x_tilde0 = problem.composite ? x_start : project(problem.feasible, x_start);
  s.x_tilde = s.x_tilde0;
  s.A = s.alpha = 1.0 / params.L;
  const GradientSample gs = sample_gradient(oracle, problem, s.x_tilde0, rng, cert != nullptr);
  const double f0 = problem.value(s.x_tilde0);
  s.acc_grad = s.alpha * gs.grad;
  s.acc_point = s.alpha * s.x_tilde0;
  s.acc_f = s.alpha * f0;
  s.acc_inner = s.alpha * gs.grad.dot(s.x_tilde0);
  s.acc_sq = s.alpha * s.x_tilde0.squaredNorm();
  s.sum_A = s.A;
  s.max_error = gs.error.value_or(0.0);
  s.z = argmin_psi(s, params, problem);
  s.x = s.z;
  s.f_x = evaluate(problem, s.x).total;
  if (cert) {
    *cert = StepCertificate{};
    const PsiParts psi = psi_parts(s, params.mu_tau, problem, s.z);
    const double d2 = s.max_error * s.max_error / params.L;
    const double lhs = s.A * s.f_x;
    const double rhs = psi.value + d2 * s.sum_A;
    cert->estimate = {std::max(0.0, lhs - rhs), std::abs(lhs) + psi.magnitude + d2 * s.sum_A};
    cert->psi_at_z = psi.value;
  }
  return s;
}

StmState stm_step(StmState s, const StmParams& params, const Problem& problem,
                  const GradientOracle& oracle, RngStream& rng, StepCertificate* cert) {
  const double mu = params.mu_tau;
  const double L = params.L;
  const double w = s.anchor_weight;
  const double A_prev = s.A;
  const double alpha = solve_alpha_scaled(A_prev, mu, L, w);
  const double A = A_prev + alpha;
  const Vector x_prev = s.x;
  const Vector z_prev = s.z;
  const Vector xt = (A_prev * x_prev + alpha * z_prev) / A;

  const GradientSample gs = sample_gradient(oracle, problem, xt, rng, cert != nullptr);
  const Vector& g = gs.grad;
  const double f_xt = problem.value(xt);
  PsiParts psi_prev;
  if (cert) psi_prev = psi_parts(s, mu, problem, z_prev);

  s.k += 1;
  s.alpha = alpha;
  s.A = A;
  s.x_tilde = xt;
  s.acc_grad += alpha * g;
  s.acc_point += alpha * xt;
  s.acc_f += alpha * f_xt;
  s.acc_inner += alpha * g.dot(xt);
  s.acc_sq += alpha * xt.squaredNorm();
  s.sum_cross += alpha * (xt - z_prev).norm();
  s.sum_A += A;
  if (gs.error) s.max_error = std::max(s.max_error, *gs.error);
  s.z = argmin_psi(s, params, problem);
  s.x = (A_prev * x_prev + alpha * s.z) / A;
  s.f_x = evaluate(problem, s.x).total;

  if (cert) {
    *cert = StepCertificate{};
    const double zn = s.z.norm();
    cert->recurrence = {std::abs((w + mu * A_prev) * A - L * alpha * alpha), L * alpha * alpha};
    const Vector dz = s.z - z_prev;
    const Vector dx = s.x - xt;
    cert->similar_triangles = {(dx - (alpha / A) * dz).norm(), 1.0 + zn};
    cert->combination = {
        (A * dx - alpha * (s.z - xt) - A_prev * (x_prev - xt)).norm() / A,
        1.0 + zn + x_prev.norm()};
    const double n_lhs = std::sqrt((w + mu * A_prev) / (2.0 * A)) * dz.norm();
    const double n_rhs = std::sqrt(0.5 * L) * dx.norm();
    cert->norms = {std::abs(n_lhs - n_rhs), std::sqrt(0.5 * L) * (1.0 + zn)};
    const double d_lhs = (A_prev / A) * (xt - x_prev).norm();
    const double d_rhs = (alpha / A) * (xt - z_prev).norm();
    cert->distances = {std::abs(d_lhs - d_rhs), 1.0 + z_prev.norm() + x_prev.norm()};

    const PsiParts psi = psi_parts(s, mu, problem, s.z);
    const Vector zx = s.z - xt;
    double model = f_xt + g.dot(zx) + 0.5 * mu * zx.squaredNorm();
    double model_mag = std::abs(f_xt) + std::abs(g.dot(zx)) + 0.5 * mu * zx.squaredNorm();
    if (problem.composite) {
      const double r = problem.composite->value(s.z);
      model += r;
      model_mag += std::abs(r);
    }
    const double step = 0.5 * (w + mu * A_prev) * dz.squaredNorm();
    const double growth_rhs = psi_prev.value + step + alpha * model;
    cert->psi_growth = {std::max(0.0, growth_rhs - psi.value),
                        psi.magnitude + psi_prev.magnitude + step + alpha * model_mag};

    const double d2 = s.max_error * s.max_error / L;
    const double noise = d2 * s.sum_A + s.max_error * s.sum_cross;
    const double lhs = A * s.f_x;
    cert->estimate = {std::max(0.0, lhs - (psi.value + noise)),
                      std::abs(lhs) + psi.magnitude + noise};
    cert->psi_at_z = psi.value;
  }
  rescale(s);
  return s;
}

long n_max(double L, double R, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("n_max: eps must be positive");
  if (!(L > 0.0) || !(R > 0.0)) throw std::invalid_argument("n_max: L and R must be positive");
  const double v = std::sqrt(2.0 * L * R * R / eps);
  return static_cast<long>(std::ceil(v * (1.0 - 1e-14)));
}

bool stop_known_fstar(const StmState& state, const StmParams& params, const Problem& problem,
                      double fstar, double R, double eps, double delta) {
  (void)problem;
  return stop_test(state.f_x, state, params, fstar, R, eps, delta, false);
}

bool stop_adaptive(const StmState& state, const StmParams& params, const Problem& problem,
                   double fstar, double R, double eps, double delta) {
  (void)problem;
  return stop_test(state.f_x, state, params, fstar, R, eps, delta, true);
}

Trace run(const Problem& problem, const GradientOracle& oracle, const StmParams& params,
          const Vector& x_start, RngStream& rng, const StmObserver& observer) {
  return run_impl(problem, problem, true, oracle, params, x_start, rng, observer);
}

Trace run_reporting(const Problem& solve_on, const Problem& report, const GradientOracle& oracle,
                    const StmParams& params, const Vector& x_start, RngStream& rng,
                    const StmObserver& observer) {
  return run_impl(solve_on, report, &solve_on == &report, oracle, params, x_start, rng, observer);
}

Problem regularize(const Problem& problem, double mu, const Vector& anchor) {
  if (!(mu > 0.0)) throw std::invalid_argument("regularize: mu must be positive");
  require_dim(anchor, problem.dim, "regularize");
  Problem reg;
  reg.name = problem.name + "+reg";
  reg.dim = problem.dim;
  auto value = problem.value;
  auto grad = problem.grad;
  reg.value = [value, mu, anchor](const Vector& x) {
    return value(x) + 0.5 * mu * (x - anchor).squaredNorm();
  };
  reg.grad = [grad, mu, anchor](const Vector& x) -> Vector { return grad(x) + mu * (x - anchor); };
  reg.lips = problem.lips + mu;
  reg.mu = problem.mu + mu;
  reg.composite = problem.composite;
  reg.feasible = problem.feasible;
  if (problem.finite_sum) {
    FiniteSum fs = *problem.finite_sum;
    auto component = fs.component_grad;
    fs.component_grad = [component, mu, anchor](std::size_t i, const Vector& x) -> Vector {
      return component(i, x) + mu * (x - anchor);
    };
    reg.finite_sum = fs;
  }
  return reg;
}

RegularizedRun solve_regularized(const Problem& problem, const GradientOracle& oracle, double eps,
                                 double R, const Vector& x_start, long max_iters, RngStream& rng) {
  if (!(eps > 0.0)) throw std::invalid_argument("solve_regularized: eps must be positive");
  if (!(R > 0.0)) throw std::invalid_argument("solve_regularized: R must be positive");
  if (problem.mu != 0.0) throw std::invalid_argument("solve_regularized: expects mu = 0");
  RegularizedRun out;
  out.mu = (2.0 / 3.0) * eps / (R * R);
  const Vector anchor = problem.composite ? x_start : project(problem.feasible, x_start);
  out.regularized = regularize(problem, out.mu, anchor);
  const StmParams params = make_stm_params(out.regularized, 2, max_iters);
  out.trace = run_reporting(out.regularized, problem, oracle, params, x_start, rng);
  out.trace.solver = "stm-regularized";
  return out;
}

}  // namespace iagm
