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

#include <functional>
#include <optional>
#include <variant>

#include "iagm/oracle.hpp"
#include "iagm/problem.hpp"
#include "iagm/rng.hpp"
#include "iagm/trace.hpp"
#include "iagm/vector.hpp"

namespace iagm {

/// Runs are aborted with RunStatus::Diverged once an iterate leaves this ball.
inline constexpr double kDivergenceNorm = 1e12;

namespace stop {

struct None {};
struct MaxIters {};

/// f(x_k) - f* <= (delta_2 / A_k) sum_j A_j + 3 R delta_1 + eps.
struct KnownFstar {
  double eps = 0.0;
  double R = 0.0;
  double fstar = 0.0;
  /// Overrides the oracle's own noise bound.
  std::optional<double> delta;
};

/// f(x_k) - f* <= (delta_2 / A_k) sum_j A_j + R delta_1
///                 + (delta_1 / A_k) sum_j alpha_j ||xt_j - z_{j-1}|| + eps.
struct Adaptive {
  double eps = 0.0;
  double R = 0.0;
  double fstar = 0.0;
  std::optional<double> delta;
};

}  // namespace stop

using StopRule = std::variant<stop::None, stop::MaxIters, stop::KnownFstar, stop::Adaptive>;

struct StmParams {
  double L = 2.0;        ///< 2 * L_f
  double mu_tau = 0.0;   ///< mu (tau = 1) or mu / 2 (tau = 2)
  int tau = 1;
  long max_iters = 0;
  StopRule stop = stop::None{};
};

/// Parameters for `problem`: L = 2 L_f, mu_tau from tau. `mu_override`
/// replaces the problem's mu (e.g. 0 to run the plain convex variant).
/// Throws if tau = 2 is requested with mu = 0.
StmParams make_stm_params(const Problem& problem, int tau, long max_iters,
                          StopRule stop = stop::None{},
                          std::optional<double> mu_override = std::nullopt);

/// tau = 2 when mu > 0 and delta lies below the noise-floor crossover
/// (bounds::remark73_crossover with r_tilde), otherwise tau = 1.
int choose_tau(const Problem& problem, double delta, double r_tilde);

/// Iteration state of the similar-triangles method.
///
/// The estimating function psi_k is kept as accumulators instead of history.
/// All weights are stored multiplied by a common positive factor s
/// (`anchor_weight`), which is rescaled when A_k grows large; psi is then
/// stored as s * psi_k and every identity and inequality is homogeneous in s.
struct StmState {
  long k = 0;
  double A = 0.0;
  double alpha = 0.0;
  double anchor_weight = 1.0;
  double log_scale = 0.0;  ///< ln s
  Vector x_tilde0;
  Vector z;
  Vector x;
  Vector x_tilde;
  Vector acc_grad;   ///< sum alpha_j g_j
  Vector acc_point;  ///< sum alpha_j xt_j
  double acc_f = 0.0;
  double acc_inner = 0.0;
  double acc_sq = 0.0;
  double sum_cross = 0.0;  ///< sum_{j>=1} alpha_j ||xt_j - z_{j-1}||
  double sum_A = 0.0;
  double f_x = 0.0;        ///< F(x_k), composite part included
  double max_error = 0.0;  ///< largest realized ||g_j - grad f(xt_j)|| so far

  /// A_k and alpha_k at true scale (may overflow to inf for long strongly convex runs).
  double true_A() const;
  double true_alpha() const;
};

/// Tolerance-scaled residual of one certificate; `residual` is the violation
/// (non-negative), `scale` the magnitude it is compared against.
struct Check {
  double residual = 0.0;
  double scale = 1.0;
  bool holds(double rel_tol) const { return residual <= rel_tol * scale; }
};

/// Numerical certificates for one iteration.
struct StepCertificate {
  Check recurrence;
  Check combination;      ///< A_k(x_k - xt_k) = alpha_k(z_k - xt_k) + A_{k-1}(x_{k-1} - xt_k)
  Check norms;            ///< (1 + mu A_{k-1}) / (2 A_k) ||z_k - z_{k-1}||^2 = L/2 ||x_k - xt_k||^2
  Check distances;        ///< A_{k-1} ||xt_k - x_{k-1}|| = alpha_k ||xt_k - z_{k-1}||
  Check similar_triangles;
  Check psi_growth;       ///< psi_k(z_k) >= psi_{k-1}(z_{k-1}) + ...
  Check estimate;         ///< A_k F(x_k) <= psi_k(z_k) + delta_2 sum A + delta_1 sum_cross
  double psi_at_z = 0.0;  ///< s * psi_k(z_k)
};

using StmObserver = std::function<void(const StmState&, const StepCertificate&)>;

/// Positive root of (1 + mu A_prev)(A_prev + a) = L a^2.
double solve_alpha(double A_prev, double mu_tau, double L);

/// Positive root of (w + mu A_prev)(A_prev + a) = L a^2 (weights at scale w).
double solve_alpha_scaled(double A_prev, double mu_tau, double L, double weight);

/// Unconstrained minimizer of the quadratic part of psi_k.
Vector psi_center(const StmState& state, const StmParams& params);

/// z_k = argmin over Q of psi_k: the center, its projection, or the prox with
/// weight A / (1 + mu_tau A) in composite mode.
Vector argmin_psi(const StmState& state, const StmParams& params, const Problem& problem);

/// psi_k(x) at true scale.
double evaluate_psi(const StmState& state, const StmParams& params, const Problem& problem,
                    const Vector& x);

/// s * psi_k(x), the quantity held by the accumulators.
double evaluate_psi_scaled(const StmState& state, const StmParams& params, const Problem& problem,
                           const Vector& x);

/// Steps 2-4: anchor, first oracle call, z_0 = x_0.
StmState stm_init(const Problem& problem, const GradientOracle& oracle, const StmParams& params,
                  const Vector& x_start, RngStream& rng, StepCertificate* cert = nullptr);

/// One iteration (steps 6-13). Fills `cert` when given.
StmState stm_step(StmState state, const StmParams& params, const Problem& problem,
                  const GradientOracle& oracle, RngStream& rng, StepCertificate* cert = nullptr);

long n_max(double L, double R, double eps);

bool stop_known_fstar(const StmState& state, const StmParams& params, const Problem& problem,
                      double fstar, double R, double eps, double delta);

bool stop_adaptive(const StmState& state, const StmParams& params, const Problem& problem,
                   double fstar, double R, double eps, double delta);

/// Full run: records the initialization and every iteration until max_iters,
/// the stop rule, or divergence. The observer, when set, receives every state
/// with its certificate (computing certificates costs extra evaluations).
Trace run(const Problem& problem, const GradientOracle& oracle, const StmParams& params,
          const Vector& x_start, RngStream& rng, const StmObserver& observer = {});

/// Same as run, but reports objective values and distances against `report`
/// (used when solving a modified problem on behalf of the original).
Trace run_reporting(const Problem& solve_on, const Problem& report, const GradientOracle& oracle,
                    const StmParams& params, const Vector& x_start, RngStream& rng,
                    const StmObserver& observer = {});

struct RegularizedRun {
  Trace trace;
  double mu = 0.0;   ///< (2/3) eps / R^2
  Problem regularized;
};

/// f + (mu/2)||x - x_tilde0||^2 with mu = (2/3) eps / R^2, solved with tau = 2.
/// Gaps in the trace are against the original problem.
Problem regularize(const Problem& problem, double mu, const Vector& anchor);

RegularizedRun solve_regularized(const Problem& problem, const GradientOracle& oracle, double eps,
                                 double R, const Vector& x_start, long max_iters, RngStream& rng);

}  // namespace iagm
