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

#include "iagm/baselines.hpp"
#include "iagm/testbed.hpp"
#include "test_support.hpp"

namespace iagm {
namespace {

using test::vec;

TEST(Gd, DiagonalQuadraticClosedForm) {
  const Vector lambdas = vec({0.1, 0.5, 1.0});
  const Problem p = testbed::diagonal_quadratic(lambdas);
  const double h = 1.0 / p.lips;
  const Vector x0 = vec({1.0, -2.0, 3.0});
  RngStream rng(1);
  const Trace t = gd_run(p, oracle::Exact{}, h, x0, 60, rng);
  ASSERT_EQ(t.records.size(), 61u);
  Vector expected = x0;
  for (int i = 0; i < 3; ++i) expected[i] *= std::pow(1.0 - h * lambdas[i], 60);
  EXPECT_LT((t.final_point - expected).norm(), 1e-14);
  for (std::size_t k = 1; k < t.records.size(); ++k) {
    EXPECT_LE(t.records[k].f_value, t.records[k - 1].f_value);
  }
}

TEST(Gd, BiasedGradientDriftsToShiftedFixedPoint) {
  const double mu = 0.01, delta = 1e-3;
  const Problem p = testbed::diagonal_quadratic(vec({mu, 1.0}));
  const double h = 1.0 / p.lips;
  RngStream rng(2);
  const Trace t = gd_run(p, oracle::Bias{vec({-delta, 0.0})}, h, vec({0.0, 0.0}), 3000, rng);
  // x1_k = (delta / mu) (1 - (1 - h mu)^k)
  const double closed = delta / mu * (1.0 - std::pow(1.0 - h * mu, 3000));
  EXPECT_NEAR(t.final_point[0], closed, 1e-12);
  EXPECT_EQ(t.final_point[1], 0.0);
}

TEST(Gd, CompositeStepUsesProx) {
  Matrix X(1, 2);
  X << 1.0, 0.0;
  const Problem p = testbed::logreg_l1(X, vec({1.0}), 0.5);
  RngStream rng(3);
  const Trace t = gd_run(p, oracle::Exact{}, 1.0, vec({0.3, -0.2}), 1, rng);
  const Vector v = vec({0.3, -0.2}) - p.grad(vec({0.3, -0.2}));
  EXPECT_EQ(t.final_point, testbed::soft_threshold(v, 0.5));
  EXPECT_EQ(t.final_point[1], 0.0);
}

TEST(Gd, Validation) {
  const Problem p = testbed::diagonal_quadratic(vec({1.0}));
  RngStream rng(4);
  EXPECT_THROW(gd_run(p, oracle::Exact{}, 0.0, vec({1.0}), 5, rng), std::invalid_argument);
  EXPECT_THROW(gd_run(p, oracle::Exact{}, 1.0, vec({1.0}), -1, rng), std::invalid_argument);
  EXPECT_THROW(gd_run(p, oracle::Exact{}, 1.0, vec({1.0, 2.0}), 5, rng), std::invalid_argument);
}

TEST(Gd, TooLongStepDiverges) {
  const Problem p = testbed::diagonal_quadratic(vec({1.0}));
  RngStream rng(5);
  const Trace t = gd_run(p, oracle::Exact{}, 3.0, vec({1.0}), 1000, rng);
  EXPECT_EQ(t.status, RunStatus::Diverged);
}

TEST(TmmParams, ChiHundred) {
  const TmmParams p = tmm_params(100.0, 2.0);
  EXPECT_DOUBLE_EQ(p.rho, 0.9);
  EXPECT_DOUBLE_EQ(p.step, 1.9 / 2.0);
  EXPECT_NEAR(p.beta, 0.81 / 1.1, 1e-15);
  EXPECT_NEAR(p.gamma, 0.81 / (1.9 * 1.1), 1e-15);
  EXPECT_NEAR(p.delta_tm, 0.81 / 0.19, 1e-13);
  EXPECT_THROW(tmm_params(1.0, 1.0), std::invalid_argument);
}

TEST(TmmThreshold, Examples) {
  EXPECT_NEAR(tmm_alpha_threshold(100.0), 11.0 / 371.0, 1e-16);
  EXPECT_NEAR(tmm_alpha_threshold(4.0), 3.0 / 11.0, 1e-16);
  EXPECT_THROW(tmm_alpha_threshold(1.0), std::invalid_argument);
  double prev = 1.0;
  for (const double chi : {2.0, 10.0, 20.0, 50.0, 100.0, 1000.0}) {
    EXPECT_LT(tmm_alpha_threshold(chi), prev);
    prev = tmm_alpha_threshold(chi);
  }
}

TEST(Tmm, ExactGradientsConverge) {
  const auto inst = testbed::instance(testbed::spec::WorstCaseStronglyConvex{0.1, 100.0, 50},
                                      testbed::Coordinates::ErrorCentered);
  RngStream rng(6);
  const Trace t = tmm_run(inst.problem, oracle::Exact{}, inst.x_start, 600, rng);
  EXPECT_EQ(t.status, RunStatus::Completed);
  EXPECT_LT(*t.back().f_gap, 1e-15 * *t.records[0].f_gap);
}

TEST(Tmm, QuadraticReferenceRecursion) {
  const Problem p = testbed::diagonal_quadratic(vec({0.1, 1.0}));
  const TmmParams q = tmm_params(10.0, 1.0);
  RngStream rng(7);
  const Trace t = tmm_run(p, oracle::Exact{}, vec({1.0, 1.0}), 30, rng);
  for (int i = 0; i < 2; ++i) {
    const double lam = i == 0 ? 0.1 : 1.0;
    double xp = 1.0, xc = 1.0;
    for (int k = 0; k < 30; ++k) {
      const double y = (1.0 + q.gamma) * xc - q.gamma * xp;
      const double xn = (1.0 + q.beta) * xc - q.beta * xp - q.step * lam * y;
      xp = xc;
      xc = xn;
    }
    EXPECT_NEAR(t.final_point[i], (1.0 + q.delta_tm) * xc - q.delta_tm * xp, 1e-14);
  }
}

TEST(Tmm, LargeRelativeNoiseDivergesSmallConverges) {
  const auto inst = testbed::instance(testbed::spec::WorstCaseStronglyConvex{0.1, 100.0, 50},
                                      testbed::Coordinates::ErrorCentered);
  RngStream a(8), b(8);
  EXPECT_EQ(tmm_run(inst.problem, oracle::Relative{0.9}, inst.x_start, 3000, a).status,
            RunStatus::Diverged);
  const Trace ok = tmm_run(inst.problem, oracle::Relative{0.5 * tmm_alpha_threshold(100.0)},
                           inst.x_start, 3000, b);
  EXPECT_EQ(ok.status, RunStatus::Completed);
  EXPECT_LT(*ok.back().f_gap, 1e-10 * *ok.records[0].f_gap);
}

TEST(Tmm, RejectsUnsupportedProblems) {
  RngStream rng(9);
  EXPECT_THROW(tmm_run(testbed::worst_case_convex(1.0, 3, 3), oracle::Exact{}, Vector::Zero(3), 5, rng),
               std::invalid_argument);
}

}  // namespace
}  // namespace iagm
