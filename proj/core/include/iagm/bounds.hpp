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

namespace iagm::bounds {

/// Problem and noise constants feeding the convergence bounds. L = 2 L_f
/// throughout; delta is the absolute noise level, alpha the relative one.
struct BoundInputs {
  double L_f = 1.0;
  double mu = 0.0;
  double R = 0.0;
  double delta = 0.0;
  double alpha = 0.0;
  double eps = 0.0;
  long N = 0;
  double r_tilde_N = 0.0;
  double delta0 = 0.0;  ///< f(y_0) - f*

  double L() const { return 2.0 * L_f; }
  double mu1() const { return mu; }
  double mu2() const { return 0.5 * mu; }
  double mu_tau(int tau) const { return tau == 2 ? mu2() : mu1(); }
  double delta1() const { return delta; }
  double delta2() const { return delta * delta / (2.0 * L_f); }
  double delta3() const;
  double chi() const;
  double theta_tau(int tau) const { return mu_tau(tau) / L(); }
  /// 1 + theta/2 + sqrt(theta): per-iteration growth factor of A_k.
  double lambda_tau(int tau) const;
  /// (5 R^2 / 4) sqrt(L / mu2).
  double stm2_lambda() const;
  /// (15 alpha^2 / 4) sqrt(L^3 / mu2^3).
  double stm2_theta() const;
};

/// 1 + theta/2 + sqrt(theta) with theta = mu_tau / L.
double growth_factor(double mu_tau, double L);

/// Strongly convex rate: tau = 1 uses r_tilde_N, tau = 2 the delta_3 floor. Requires mu > 0.
double thm47_bound(int tau, const BoundInputs& in);

/// The N-independent part of thm47_bound.
double thm47_floor(int tau, const BoundInputs& in);

/// 4 L R^2 / N^2 + 3 r_tilde_N delta_1 + N delta_2, N >= 1.
double thm47_bound_convex(const BoundInputs& in, long N, double r_tilde_N);

/// Minimizer over real N > 0 of 4 L R^2 / N^2 + N delta_2: (8 L R^2 / delta_2)^(1/3).
double convex_optimal_horizon(const BoundInputs& in);

/// (5 L R^2 / 4 + (15/196) sqrt(2L/mu) delta0) exp(-(k/4) sqrt(mu / (2L))).
double thm51_bound(const BoundInputs& in, long k);

/// Bound implied by the relative-noise recursion:
/// ((1+theta)^{k-1} / A_k) lambda + theta A_0 (1+theta)^{k-1} / A_k delta0, from ln A_k.
double recursion_bound_relative(const BoundInputs& in, long k, double log_A_k);

/// L exp(-(k/4) sqrt(mu2 / L)); throws if alpha exceeds mu2 / (7 L).
double envelope38(const BoundInputs& in, long k);

/// The inequality 1 + theta + s/2 + s theta/2 <= 1 + sqrt(mu2/(2L)), s = sqrt(mu2 / L).
bool chain38_holds(const BoundInputs& in);

struct Remark74Budget {
  double delta_max = 0.0;
  long N_min = 0;
};

/// Noise level and iteration count giving f(x_N) - f* <= eps with tau = 2.
Remark74Budget remark74_budget(double eps, double mu, double L_f, double R);

struct Remark75Budget {
  double mu = 0.0;
  double delta_max = 0.0;
  long N_min = 0;
};

/// Regularization level, noise level and iteration count for the convex case
/// solved through quadratic regularization.
Remark75Budget remark75_budget(double eps, double L, double R);

struct Remark76Budget {
  double eps = 0.0;    ///< eps0^2 / 2
  double zeta = 0.0;   ///< eps / 3
  double delta_max = 0.0;
  double N_eps0 = 0.0; ///< sqrt(6 L R*^2) / eps0 + 1
};

/// Accuracy budget for Ax = b through 0.5 ||Ax - b||^2 with the stop rule.
Remark76Budget remark76_budget(double eps0, double L, double R_star);

/// The delta at which the tau = 1 and tau = 2 noise floors of thm47 coincide;
/// below it the tau = 2 floor is smaller.
double remark73_crossover(double mu, double L_f, double r_tilde);

/// 3 R / ((1 + sqrt(L/mu)) / mu + sqrt(L/mu)(sqrt 2 - 1) / L), the closed
/// form as usually quoted. It overestimates remark73_crossover.
double remark73_crossover_display(double mu, double L_f, double r_tilde);

/// Bound for the regularized problem f + (mu_reg/2)||x - x0||^2 solved with
/// tau = 2, translated to the original objective:
/// L' R^2 exp(-0.5 sqrt(mu_reg / (2 L')) k) + (1 + sqrt(2 L' / mu_reg))(delta^2 / L' + delta^2 / mu_reg) + mu_reg R^2 / 2,
/// with L' = 2 (L_f + mu_reg).
double regularized_bound(double L_f, double mu_reg, double R, double delta, long k);

}  // namespace iagm::bounds
