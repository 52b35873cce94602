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

#include <cmath>

#include "iagm/bounds.hpp"
#include "iagm/stm.hpp"
#include "iagm/stm2.hpp"
#include "iagm/testbed.hpp"

namespace iagm::bounds {
namespace {

BoundInputs inputs(double L_f, double mu, double R, double delta) {
  BoundInputs in;
  in.L_f = L_f;
  in.mu = mu;
  in.R = R;
  in.delta = delta;
  return in;
}

TEST(BoundInputs, DerivedConstants) {
  const BoundInputs in = inputs(2.0, 0.5, 1.0, 0.3);
  EXPECT_DOUBLE_EQ(in.L(), 4.0);
  EXPECT_DOUBLE_EQ(in.mu2(), 0.25);
  EXPECT_DOUBLE_EQ(in.delta2(), 0.09 / 4.0);
  EXPECT_DOUBLE_EQ(in.delta3(), 0.09 / 0.5);
  EXPECT_DOUBLE_EQ(in.chi(), 4.0);
  EXPECT_TRUE(std::isinf(inputs(1.0, 0.0, 1.0, 0.1).delta3()));
}

TEST(GrowthFactor, Example) {
  EXPECT_DOUBLE_EQ(growth_factor(0.25, 1.0), 1.625);
  EXPECT_DOUBLE_EQ(growth_factor(0.0, 3.0), 1.0);
}

TEST(NoisyRateBound, Tau2Example) {
  BoundInputs in = inputs(1.0, 0.1, 1.0, 0.5);
  in.N = 0;
  const double floor = (1.0 + 6.324555320336759) * (0.125 + 2.5);
  EXPECT_NEAR(thm47_floor(2, in), floor, 1e-13);
  EXPECT_NEAR(thm47_bound(2, in), 2.0 + floor, 1e-13);
  in.N = 400;
  EXPECT_NEAR(thm47_bound(2, in), 2.0 * std::exp(-0.5 * std::sqrt(0.025) * 400.0) + floor, 1e-13);
}

TEST(NoisyRateBound, Tau1Example) {
  BoundInputs in = inputs(1.0, 0.2, 2.0, 0.1);
  in.N = 10;
  in.r_tilde_N = 3.0;
  const double floor = (1.0 + std::sqrt(10.0)) * 0.005 + 0.9;
  EXPECT_NEAR(thm47_floor(1, in), floor, 1e-15);
  EXPECT_NEAR(thm47_bound(1, in), 8.0 * std::exp(-0.5 * std::sqrt(0.1) * 10.0) + floor, 1e-14);
  EXPECT_THROW(thm47_bound(3, in), std::invalid_argument);
  EXPECT_THROW(thm47_bound(1, inputs(1.0, 0.0, 1.0, 0.0)), std::invalid_argument);
}

TEST(NoisyRateBound, ZeroNoiseFloorVanishes) {
  const BoundInputs in = inputs(1.0, 0.1, 1.0, 0.0);
  EXPECT_EQ(thm47_floor(1, in), 0.0);
  EXPECT_EQ(thm47_floor(2, in), 0.0);
}

TEST(ConvexRateBound, Example) {
  const BoundInputs in = inputs(1.0, 0.0, 1.0, 0.1);
  EXPECT_NEAR(thm47_bound_convex(in, 2, 1.5), 2.0 + 0.45 + 2.0 * 0.005, 1e-15);
  EXPECT_THROW(thm47_bound_convex(in, 0, 1.0), std::invalid_argument);
}

TEST(ConvexHorizon, MinimizesTheNonFloorTerms) {
  for (const double delta : {1e-3, 1e-2, 0.1}) {
    const BoundInputs in = inputs(1.0, 0.0, 2.0, delta);
    const double star = convex_optimal_horizon(in);
    auto g = [&](double N) { return 4.0 * in.L() * in.R * in.R / (N * N) + N * in.delta2(); };
    // Independent check by golden-section search.
    double a = 1.0, b = 1e7;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int i = 0; i < 300; ++i) {
      const double c = b - r * (b - a), d = a + r * (b - a);
      (g(c) < g(d) ? b : a) = (g(c) < g(d) ? d : c);
    }
    EXPECT_NEAR(star, 0.5 * (a + b), 1e-6 * star);
  }
  EXPECT_THROW(convex_optimal_horizon(inputs(1.0, 0.0, 1.0, 0.0)), std::invalid_argument);
}

TEST(RelativeRateBound, Example) {
  BoundInputs in = inputs(1.0, 0.1, 2.0, 0.0);
  in.delta0 = 3.0;
  const double pre = 1.25 * 2.0 * 4.0 + 15.0 / 196.0 * std::sqrt(40.0) * 3.0;
  EXPECT_NEAR(thm51_bound(in, 0), pre, 1e-13);
  EXPECT_NEAR(thm51_bound(in, 100), pre * std::exp(-25.0 * std::sqrt(0.025)), 1e-13);
}

TEST(RelativeRecursionBound, FirstIterateValue) {
  BoundInputs in = inputs(1.0, 0.1, 1.0, 0.0);
  in.alpha = 0.001;
  in.delta0 = 2.0;
  const double theta = 3.75 * 1e-6 * std::pow(40.0, 1.5);
  const double lam = 1.25 * std::sqrt(40.0);
  EXPECT_NEAR(recursion_bound_relative(in, 1, std::log(0.5)), 2.0 * (lam + theta * 0.5 * 2.0), 1e-12);
  EXPECT_THROW(recursion_bound_relative(in, 0, 0.0), std::invalid_argument);
}

TEST(RelativeEnvelope, RejectsAlphaAboveLimit) {
  BoundInputs in = inputs(1.0, 0.1, 1.0, 0.0);
  in.alpha = max_alpha_relative(in.mu, in.L_f);
  EXPECT_NEAR(envelope38(in, 0), 2.0, 1e-15);
  EXPECT_NEAR(envelope38(in, 40), 2.0 * std::exp(-10.0 * std::sqrt(0.025)), 1e-15);
  in.alpha *= 1.01;
  EXPECT_THROW(envelope38(in, 1), std::invalid_argument);
}

TEST(RelativeChain, HoldsAtTheLimitAndFailsWellAbove) {
  for (const double chi : {2.0, 20.0, 1000.0}) {
    BoundInputs in = inputs(1.0, 1.0 / chi, 1.0, 0.0);
    in.alpha = max_alpha_relative(in.mu, in.L_f);
    EXPECT_TRUE(chain38_holds(in));
    in.alpha *= 3.0;
    EXPECT_FALSE(chain38_holds(in));
  }
}

TEST(TauCrossover, FloorsCoincideAtCrossover) {
  for (const double mu : {0.01, 0.1, 0.5}) {
    for (const double r : {0.5, 2.0}) {
      BoundInputs in = inputs(1.0, mu, 1.0, remark73_crossover(mu, 1.0, r));
      in.r_tilde_N = r;
      EXPECT_NEAR(thm47_floor(1, in), thm47_floor(2, in), 1e-12 * thm47_floor(1, in));
      in.delta *= 0.5;
      EXPECT_LT(thm47_floor(2, in), thm47_floor(1, in));
      in.delta *= 4.0;
      EXPECT_GT(thm47_floor(2, in), thm47_floor(1, in));
    }
  }
}

TEST(TauCrossover, DisplayedFormDiffersOnlyInTheRatio) {
  const double c = remark73_crossover(0.1, 1.0, 1.0);
  const double d = remark73_crossover_display(0.1, 1.0, 1.0);
  EXPECT_GT(d, c);
  const double L = 2.0;
  EXPECT_NEAR(3.0 / d, (1.0 + std::sqrt(L / 0.1)) / 0.1 + std::sqrt(L / 0.1) * (std::sqrt(2.0) - 1.0) / L, 1e-12);
}

TEST(StronglyConvexBudget, BudgetReachesTarget) {
  for (const double eps : {1e-1, 1e-3, 1e-6}) {
    for (const double mu : {0.01, 0.1}) {
      const double L_f = 1.0, R = 3.0;
      const Remark74Budget b = remark74_budget(eps, mu, L_f, R);
      BoundInputs in = inputs(L_f, mu, R, b.delta_max);
      in.N = b.N_min;
      EXPECT_LE(thm47_bound(2, in), eps * (1.0 + 1e-12)) << "eps=" << eps << " mu=" << mu;
    }
  }
  EXPECT_THROW(remark74_budget(0.0, 0.1, 1.0, 1.0), std::invalid_argument);
}

TEST(RegularizedBudget, NoiseToleranceScalesWithEpsToTheFiveFourths) {
  const double L = 1.0, R = 2.0;
  const double a = remark75_budget(1e-4, L, R).delta_max, b = remark75_budget(1e-1, L, R).delta_max;
  EXPECT_NEAR(std::log(b / a) / std::log(1e3), 1.25, 1e-12);
  for (const double eps : {1e-1, 1e-2, 1e-3}) {
    const Remark75Budget r = remark75_budget(eps, L, R);
    EXPECT_NEAR(r.mu, (2.0 / 3.0) * eps / (R * R), 1e-18);
    EXPECT_GT(r.N_min, 0);
  }
  EXPECT_THROW(remark75_budget(0.0, L, R), std::invalid_argument);
}

TEST(RegularizedBudget, RegularizedSolveReachesTarget) {
  const auto inst = testbed::instance(testbed::spec::WorstCaseConvex{1.0, 25, 50});
  for (const double eps : {0.1, 0.03}) {
    const Remark75Budget b = remark75_budget(eps, inst.problem.lips, inst.R);
    RngStream rng(1);
    const auto out = solve_regularized(inst.problem, oracle::Absolute{b.delta_max}, eps, inst.R,
                                       inst.x_start, b.N_min, rng);
    EXPECT_LE(*out.trace.back().f_gap, eps) << "eps=" << eps;
  }
}

TEST(LinearSystemBudget, Example) {
  const Remark76Budget b = remark76_budget(0.1, 2.0, 1.0);
  EXPECT_DOUBLE_EQ(b.eps, 0.005);
  EXPECT_NEAR(b.zeta, 0.005 / 3.0, 1e-18);
  EXPECT_NEAR(b.N_eps0, std::sqrt(12.0) / 0.1 + 1.0, 1e-12);
  const double a = std::pow(2.0, 0.25) / (6.0 * std::sqrt(3.0)) * std::pow(0.005, 0.75);
  EXPECT_NEAR(b.delta_max, std::min(a, 0.005 / 9.0), 1e-18);
}

TEST(RegularizedBound, Example) {
  const double Lp = 2.0 * 1.5, mu2 = 0.25;
  const double expected = Lp * 4.0 + (1.0 + std::sqrt(Lp / mu2)) * (0.01 / Lp + 0.01 / 0.5) + 0.25 * 4.0;
  EXPECT_NEAR(regularized_bound(1.0, 0.5, 2.0, 0.1, 0), expected, 1e-14);
  EXPECT_THROW(regularized_bound(1.0, 0.0, 1.0, 0.0, 0), std::invalid_argument);
}

}  // namespace
}  // namespace iagm::bounds
