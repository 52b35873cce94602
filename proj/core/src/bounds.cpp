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

#include "iagm/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace iagm::bounds {
namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

}  // namespace

double BoundInputs::delta3() const {
  return mu > 0.0 ? delta * delta / mu : std::numeric_limits<double>::infinity();
}

double BoundInputs::chi() const {
  return mu > 0.0 ? L_f / mu : std::numeric_limits<double>::infinity();
}

double BoundInputs::lambda_tau(int tau) const { return growth_factor(mu_tau(tau), L()); }

double BoundInputs::stm2_lambda() const {
  require_positive(mu, "stm2_lambda: mu");
  return 1.25 * R * R * std::sqrt(L() / mu2());
}

double BoundInputs::stm2_theta() const {
  require_positive(mu, "stm2_theta: mu");
  return 3.75 * alpha * alpha * std::pow(L() / mu2(), 1.5);
}

double growth_factor(double mu_tau, double L) {
  require_positive(L, "growth_factor: L");
  const double theta = mu_tau / L;
  return 1.0 + 0.5 * theta + std::sqrt(theta);
}

double thm47_floor(int tau, const BoundInputs& in) {
  require_positive(in.mu, "thm47: mu");
  const double L = in.L();
  if (tau == 1) return (1.0 + std::sqrt(L / in.mu1())) * in.delta2() + 3.0 * in.r_tilde_N * in.delta1();
  if (tau == 2) return (1.0 + std::sqrt(L / in.mu2())) * (in.delta2() + in.delta3());
  throw std::invalid_argument("thm47: tau must be 1 or 2");
}

double thm47_bound(int tau, const BoundInputs& in) {
  const double floor = thm47_floor(tau, in);
  const double L = in.L();
  const double rate = std::sqrt(in.mu_tau(tau) / L);
  return L * in.R * in.R * std::exp(-0.5 * rate * static_cast<double>(in.N)) + floor;
}

double thm47_bound_convex(const BoundInputs& in, long N, double r_tilde_N) {
  if (N < 1) throw std::invalid_argument("thm47_bound_convex: N must be >= 1");
  const double n = static_cast<double>(N);
  return 4.0 * in.L() * in.R * in.R / (n * n) + 3.0 * r_tilde_N * in.delta1() + n * in.delta2();
}

double convex_optimal_horizon(const BoundInputs& in) {
  require_positive(in.delta, "convex_optimal_horizon: delta");
  return std::cbrt(8.0 * in.L() * in.R * in.R / in.delta2());
}

double thm51_bound(const BoundInputs& in, long k) {
  require_positive(in.mu, "thm51_bound: mu");
  const double L = in.L();
  const double pre = 1.25 * L * in.R * in.R + (15.0 / 196.0) * std::sqrt(2.0 * L / in.mu) * in.delta0;
  return pre * std::exp(-0.25 * static_cast<double>(k) * std::sqrt(in.mu / (2.0 * L)));
}

double recursion_bound_relative(const BoundInputs& in, long k, double log_A_k) {
  if (k < 1) throw std::invalid_argument("recursion_bound_relative: k must be >= 1");
  const double theta = in.stm2_theta();
  const double A0 = 1.0 / in.L();
  const double growth = static_cast<double>(k - 1) * std::log1p(theta) - log_A_k;
  return std::exp(growth) * (in.stm2_lambda() + theta * A0 * in.delta0);
}

double envelope38(const BoundInputs& in, long k) {
  require_positive(in.mu, "envelope38: mu");
  const double L = in.L();
  const double limit = in.mu2() / (7.0 * L);
  if (in.alpha > limit * (1.0 + 1e-12)) {
    throw std::invalid_argument("envelope38: alpha exceeds mu2 / (7 L)");
  }
  return L * std::exp(-0.25 * static_cast<double>(k) * std::sqrt(in.mu2() / L));
}

bool chain38_holds(const BoundInputs& in) {
  const double theta = in.stm2_theta();
  const double s = std::sqrt(in.mu2() / in.L());
  return 1.0 + theta + 0.5 * s + 0.5 * s * theta <= 1.0 + std::sqrt(in.mu2() / (2.0 * in.L()));
}

Remark74Budget remark74_budget(double eps, double mu, double L_f, double R) {
  require_positive(eps, "remark74_budget: eps");
  require_positive(mu, "remark74_budget: mu");
  require_positive(L_f, "remark74_budget: L_f");
  require_positive(R, "remark74_budget: R");
  const double ratio = std::sqrt(4.0 * L_f / mu);
  Remark74Budget b;
  b.delta_max = std::sqrt(eps) * std::sqrt(mu * L_f / (mu + 2.0 * L_f)) / std::sqrt(1.0 + ratio);
  const double n = 2.0 * ratio * (std::log(4.0 * L_f * R * R) + std::log(1.0 / eps));
  b.N_min = static_cast<long>(std::ceil(std::max(n, 0.0)));
  return b;
}

Remark75Budget remark75_budget(double eps, double L, double R) {
  require_positive(eps, "remark75_budget: eps");
  require_positive(L, "remark75_budget: L");
  require_positive(R, "remark75_budget: R");
  Remark75Budget b;
  b.mu = (2.0 / 3.0) * eps / (R * R);
  b.delta_max = std::pow(2.0 / 243.0, 0.25) / std::sqrt(1.0 + std::sqrt(2.0 * L + 4.0)) *
                std::pow(R, -1.5) * std::pow(eps, 1.25);
  const double n = std::sqrt(12.0 * L + 24.0) * R * std::log(2.0 * L * R * R) +
                   2.0 * std::sqrt(2.0 * L + 4.0) / std::sqrt(eps) * std::log(1.0 / eps);
  b.N_min = static_cast<long>(std::ceil(std::max(n, 0.0)));
  return b;
}

Remark76Budget remark76_budget(double eps0, double L, double R_star) {
  require_positive(eps0, "remark76_budget: eps0");
  require_positive(L, "remark76_budget: L");
  require_positive(R_star, "remark76_budget: R_star");
  Remark76Budget b;
  b.eps = 0.5 * eps0 * eps0;
  b.zeta = b.eps / 3.0;
  b.delta_max = std::min(std::pow(L, 0.25) / (6.0 * std::sqrt(3.0) * R_star) * std::pow(b.eps, 0.75),
                         b.eps / (9.0 * R_star));
  b.N_eps0 = std::sqrt(6.0 * L * R_star * R_star) / eps0 + 1.0;
  return b;
}

double remark73_crossover(double mu, double L_f, double r_tilde) {
  require_positive(mu, "remark73_crossover: mu");
  require_positive(L_f, "remark73_crossover: L_f");
  const double L = 2.0 * L_f;
  const double denom = (1.0 + std::sqrt(2.0 * L / mu)) / mu + (std::sqrt(2.0) - 1.0) * std::sqrt(L / mu) / L;
  return 3.0 * r_tilde / denom;
}

double remark73_crossover_display(double mu, double L_f, double r_tilde) {
  require_positive(mu, "remark73_crossover_display: mu");
  require_positive(L_f, "remark73_crossover_display: L_f");
  const double L = 2.0 * L_f;
  const double denom = (1.0 + std::sqrt(L / mu)) / mu + std::sqrt(L / mu) * (std::sqrt(2.0) - 1.0) / L;
  return 3.0 * r_tilde / denom;
}

double regularized_bound(double L_f, double mu_reg, double R, double delta, long k) {
  require_positive(mu_reg, "regularized_bound: mu_reg");
  const double Lp = 2.0 * (L_f + mu_reg);
  const double mu2 = 0.5 * mu_reg;
  const double decay = Lp * R * R * std::exp(-0.5 * std::sqrt(mu2 / Lp) * static_cast<double>(k));
  const double floor = (1.0 + std::sqrt(Lp / mu2)) * (delta * delta / Lp + delta * delta / mu_reg);
  return decay + floor + 0.5 * mu_reg * R * R;
}

}  // namespace iagm::bounds
