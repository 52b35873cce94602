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
#include <limits>

#include "iagm/bounds.hpp"
#include "iagm/stm.hpp"
#include "iagm/testbed.hpp"
#include "test_support.hpp"

namespace iagm {
namespace {

using test::vec;

double quadratic_residual(double A_prev, double mu, double L, double alpha) {
  return (1.0 + mu * A_prev) * (A_prev + alpha) - L * alpha * alpha;
}

TEST(SolveAlpha, GoldenRatioCase) {
  const double a = solve_alpha(1.0, 0.0, 1.0);
  EXPECT_NEAR(a, (1.0 + std::sqrt(5.0)) / 2.0, 1e-12);
  EXPECT_LT(std::abs(quadratic_residual(1.0, 0.0, 1.0, a)), 1e-12 * a * a);
}

TEST(SolveAlpha, FromZero) { EXPECT_DOUBLE_EQ(solve_alpha(0.0, 0.0, 1.0), 1.0); }

TEST(SolveAlpha, ResidualSmallOverWideRange) {
  for (const double L : {0.5, 2.0, 200.0})
    for (const double mu : {0.0, 1e-3, 0.4})
      for (const double A : {0.0, 1e-3, 1.0, 1e3, 1e8}) {
        const double a = solve_alpha(A, mu, L);
        EXPECT_GT(a, 0.0);
        EXPECT_LE(std::abs(quadratic_residual(A, mu, L, a)), 1e-12 * L * a * a)
            << "L=" << L << " mu=" << mu << " A=" << A;
      }
}

TEST(SolveAlpha, StepIncreasesByAtLeastHalfOverL) {
  for (const double L : {0.3, 1.0, 7.0}) {
    double A = 1.0 / L, prev = 1.0 / L;
    for (int k = 1; k < 500; ++k) {
      const double a = solve_alpha(A, 0.0, L);
      EXPECT_GE(a, prev + 0.5 / L - 1e-12 * a);
      prev = a;
      A += a;
    }
  }
}

TEST(ArgminPsi, ConvexUnconstrainedIsAnchorMinusGradientSum) {
  StmState s;
  s.x_tilde0 = vec({1.0, 2.0});
  s.acc_grad = vec({0.5, -1.0});
  s.acc_point = vec({3.0, 3.0});
  s.A = 2.0;
  StmParams params;
  params.mu_tau = 0.0;
  const Problem p = testbed::diagonal_quadratic(vec({1.0, 1.0}));
  EXPECT_EQ(argmin_psi(s, params, p), vec({0.5, 3.0}));
}

// psi_0(x) = 0.5 |x - x0|^2 + a0 (f(x0) + <g0, x - x0> + mu/2 |x - x0|^2).
double psi0_direct(const Problem& p, double mu, double a0, const Vector& x0, const Vector& x) {
  const Vector d = x - x0;
  return 0.5 * d.squaredNorm() + a0 * (p.value(x0) + p.grad(x0).dot(d) + 0.5 * mu * d.squaredNorm());
}

TEST(ArgminPsi, InitialPointMatchesGridMinimization) {
  const Problem p = testbed::diagonal_quadratic(vec({0.5, 1.0}));
  const StmParams params = make_stm_params(p, 1, 0);
  const Vector x0 = vec({1.0, -1.5});
  RngStream rng(1);
  const StmState s = stm_init(p, oracle::Exact{}, params, x0, rng);
  const double a0 = 1.0 / params.L;

  // Coarse-to-fine grid search for the minimizer of the direct formula.
  Vector best = x0;
  double width = 4.0;
  for (int level = 0; level < 6; ++level) {
    const Vector centre = best;
    double best_val = std::numeric_limits<double>::infinity();
    const int steps = 200;
    for (int i = 0; i <= steps; ++i)
      for (int j = 0; j <= steps; ++j) {
        const Vector x = centre + vec({width * (i / double(steps) - 0.5), width * (j / double(steps) - 0.5)});
        const double v = psi0_direct(p, params.mu_tau, a0, x0, x);
        if (v < best_val) {
          best_val = v;
          best = x;
        }
      }
    width /= 50.0;
  }
  EXPECT_NEAR((s.z - best).norm(), 0.0, 1e-6);
  EXPECT_NEAR((s.z - (x0 - a0 * p.grad(x0) / (1.0 + params.mu_tau * a0))).norm(), 0.0, 1e-14);
  EXPECT_EQ(s.x, s.z);
}

TEST(ArgminPsi, CompositeUsesSoftThreshold) {
  Matrix X(1, 2);
  X << 1.0, 0.0;
  const Problem p = testbed::logreg_l1(X, vec({1.0}), 1.0);
  StmState s;
  s.x_tilde0 = vec({3.0, -0.5});
  s.acc_grad = Vector::Zero(2);
  s.acc_point = Vector::Zero(2);
  s.A = 1.0;
  StmParams params;
  params.mu_tau = 0.0;
  const Vector z = argmin_psi(s, params, p);
  EXPECT_NEAR(z[0], 2.0, 1e-15);
  EXPECT_EQ(z[1], 0.0);
}

TEST(EvaluatePsi, AtAnchorInitiallyIsWeightedValue) {
  const Problem p = testbed::worst_case_convex(1.0, 5, 8);
  const StmParams params = make_stm_params(p, 1, 0);
  RngStream rng(2);
  const Vector x0 = Vector::Constant(8, 0.3);
  const StmState s = stm_init(p, oracle::Absolute{0.2}, params, x0, rng);
  EXPECT_NEAR(evaluate_psi(s, params, p, x0), s.alpha * p.value(x0), 1e-14);
}

TEST(EvaluatePsi, InitialMatchesDirectFormula) {
  const Problem p = testbed::worst_case_strongly_convex(0.2, 10.0, 6);
  for (const int tau : {1, 2}) {
    const StmParams params = make_stm_params(p, tau, 0);
    RngStream rng(3), data(4);
    const Vector x0 = test::random_vector(data, 6);
    const StmState s = stm_init(p, oracle::Exact{}, params, x0, rng);
    for (int i = 0; i < 20; ++i) {
      const Vector x = test::random_vector(data, 6, 3.0);
      const double direct = psi0_direct(p, params.mu_tau, s.alpha, x0, x);
      EXPECT_NEAR(evaluate_psi(s, params, p, x), direct, 1e-10 * (1.0 + std::abs(direct)));
    }
  }
}

TEST(EvaluatePsi, MinimizerPropertyAlongRun) {
  const Problem p = testbed::worst_case_strongly_convex(0.1, 20.0, 10);
  const StmParams params = make_stm_params(p, 2, 0);
  RngStream rng(5), data(6);
  StmState s = stm_init(p, oracle::Absolute{0.05}, params, Vector::Zero(10), rng);
  for (int k = 0; k < 30; ++k) s = stm_step(std::move(s), params, p, oracle::Absolute{0.05}, rng);
  const double at_z = evaluate_psi(s, params, p, s.z);
  for (int i = 0; i < 100; ++i) {
    const Vector x = s.z + test::random_vector(data, 10, 0.5);
    EXPECT_LE(at_z, evaluate_psi(s, params, p, x) + 1e-12 * std::abs(at_z));
  }
}

TEST(StmStep, MatchesScalarReferenceSimulation) {
  const Problem p = testbed::diagonal_quadratic(vec({1.0}));
  const StmParams params = make_stm_params(p, 1, 40, stop::None{}, 0.0);
  RngStream rng(7);
  const Trace t = run(p, oracle::Exact{}, params, vec({1.0}), rng);

  // Independent scalar re-derivation of the method for f = x^2 / 2, mu_tau = 0.
  const double L = 2.0, x0 = 1.0;
  double A = 1.0 / L, alpha = A;
  double acc_grad = alpha * x0;
  double z = x0 - acc_grad, x = z;
  std::vector<double> ref = {0.5 * x * x};
  for (int k = 1; k <= 40; ++k) {
    const double a = 1.0 / (2.0 * L) + std::sqrt(1.0 / (4.0 * L * L) + A / L);
    const double A_new = A + a;
    const double xt = (A * x + a * z) / A_new;
    acc_grad += a * xt;
    z = x0 - acc_grad;
    x = (A * x + a * z) / A_new;
    A = A_new;
    ref.push_back(0.5 * x * x);
  }
  ASSERT_EQ(t.records.size(), ref.size());
  for (std::size_t k = 0; k < ref.size(); ++k) {
    EXPECT_NEAR(t.records[k].f_value, ref[k], 1e-14) << "k=" << k;
    if (k >= 1) {
      EXPECT_LT(t.records[k].f_value, 0.5 * x0 * x0);
    }
  }
}

TEST(Run, ZeroIterationsGivesInitialRecord) {
  const Problem p = testbed::worst_case_convex(1.0, 4, 6);
  const StmParams params = make_stm_params(p, 1, 0);
  RngStream rng(8), rng2(8);
  const Vector x_start = Vector::Constant(6, 0.1);
  const Trace t = run(p, oracle::Exact{}, params, x_start, rng);
  ASSERT_EQ(t.records.size(), 1u);
  EXPECT_EQ(t.records[0].k, 0);
  const StmState s = stm_init(p, oracle::Exact{}, params, x_start, rng2);
  EXPECT_EQ(t.final_point, s.z);
  EXPECT_EQ(t.status, RunStatus::Completed);
}

TEST(Run, RowCountIsItersPlusOne) {
  const Problem p = testbed::worst_case_convex(1.0, 4, 6);
  RngStream rng(9);
  const Trace t = run(p, oracle::Absolute{0.01}, make_stm_params(p, 1, 123), Vector::Zero(6), rng);
  EXPECT_EQ(t.records.size(), 124u);
  for (std::size_t k = 1; k < t.records.size(); ++k) {
    EXPECT_EQ(t.records[k].k, t.records[k - 1].k + 1);
    EXPECT_GT(*t.records[k].A_k, *t.records[k - 1].A_k);
    EXPECT_GE(t.records[k].r_tilde_k, t.records[k - 1].r_tilde_k);
  }
}

TEST(Run, ExactStronglyConvexLinearRate) {
  const auto inst = testbed::instance(testbed::spec::WorstCaseStronglyConvex{0.1, 30.0, 30});
  const StmParams params = make_stm_params(inst.problem, 1, 400);
  RngStream rng(10);
  const Trace t = run(inst.problem, oracle::Exact{}, params, inst.x_start, rng);
  const double L = params.L, R = inst.R;
  for (const auto& r : t.records) {
    const double bound = L * R * R * std::exp(-0.5 * std::sqrt(params.mu_tau / L) * double(r.k));
    EXPECT_LE(*r.f_gap, bound) << "k=" << r.k;
  }
}

TEST(Run, AbsoluteNoiseTau2FloorPlusDecay) {
  const auto inst = testbed::instance(testbed::spec::WorstCaseStronglyConvex{0.1, 30.0, 30});
  const double delta = 0.3;
  const StmParams params = make_stm_params(inst.problem, 2, 1500);
  bounds::BoundInputs in;
  in.L_f = inst.problem.lips;
  in.mu = inst.problem.mu;
  in.R = inst.R;
  in.delta = delta;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    RngStream rng(seed);
    const Trace t = run(inst.problem, oracle::Absolute{delta}, params, inst.x_start, rng);
    for (const auto& r : t.records) {
      in.N = r.k;
      EXPECT_LE(*r.f_gap, bounds::thm47_bound(2, in)) << "k=" << r.k;
    }
  }
}

TEST(Run, ConstrainedIteratesStayFeasible) {
  Problem p = testbed::worst_case_convex(1.0, 10, 10);
  p.known_argmin.reset();
  p.known_min.reset();
  p.gap = nullptr;
  p.feasible = Ball{Vector::Zero(10), 0.5};
  RngStream rng(11);
  double max_norm = 0.0;
  const Trace t = run(p, oracle::Absolute{0.01}, make_stm_params(p, 1, 300), Vector::Ones(10), rng,
                      [&](const StmState& s, const StepCertificate&) {
                        max_norm = std::max({max_norm, s.z.norm(), s.x.norm(), s.x_tilde.norm()});
                      });
  EXPECT_LE(max_norm, 0.5 * (1.0 + 1e-12));
  EXPECT_FALSE(t.reference_exact);
}

TEST(Run, DivergenceIsAStatusNotAnError) {
  Problem p = testbed::diagonal_quadratic(vec({1.0, 1.0}));
  p.lips = 1e-3;  // deliberately wrong: steps are far too long
  p.mu = 0.0;
  RngStream rng(12);
  const Trace t = run(p, oracle::Exact{}, make_stm_params(p, 1, 5000), vec({1.0, 1.0}), rng);
  EXPECT_EQ(t.status, RunStatus::Diverged);
  EXPECT_LT(t.records.size(), 5001u);
  for (const auto& r : t.records) EXPECT_TRUE(std::isfinite(r.f_value));
}

TEST(Run, LongStronglyConvexRunRescalesSafely) {
  const auto inst = testbed::instance(testbed::spec::WorstCaseStronglyConvex{0.5, 2.0, 5},
                                      testbed::Coordinates::ErrorCentered);
  RngStream rng(13);
  int checked = 0;
  const Trace t = run(inst.problem, oracle::Exact{}, make_stm_params(inst.problem, 1, 20000),
                      inst.x_start, rng, [&](const StmState& s, const StepCertificate& c) {
                        if (s.k == 0) return;
                        ++checked;
                        EXPECT_TRUE(c.recurrence.holds(1e-9));
                        EXPECT_TRUE(c.estimate.holds(1e-9));
                        EXPECT_TRUE(std::isfinite(s.A));
                      });
  EXPECT_EQ(checked, 20000);
  EXPECT_EQ(t.status, RunStatus::Completed);
  EXPECT_TRUE(std::isinf(*t.back().A_k) || *t.back().A_k > 1e300);
  EXPECT_LE(*t.back().f_gap, 1e-15);
}

TEST(Params, Validation) {
  const Problem convex = testbed::worst_case_convex(1.0, 3, 3);
  EXPECT_THROW(make_stm_params(convex, 2, 10), std::invalid_argument);
  EXPECT_THROW(make_stm_params(convex, 3, 10), std::invalid_argument);
  const Problem sc = testbed::worst_case_strongly_convex(0.1, 10.0, 5);
  const StmParams p2 = make_stm_params(sc, 2, 10);
  EXPECT_DOUBLE_EQ(p2.L, 2.0 * sc.lips);
  EXPECT_DOUBLE_EQ(p2.mu_tau, 0.05);
  EXPECT_THROW(make_stm_params(sc, 1, 10, stop::None{}, 1.0), std::invalid_argument);
  EXPECT_DOUBLE_EQ(make_stm_params(sc, 1, 10, stop::None{}, 0.0).mu_tau, 0.0);
}

TEST(ChooseTau, FollowsCrossover) {
  const Problem sc = testbed::worst_case_strongly_convex(0.1, 10.0, 5);
  const double c = bounds::remark73_crossover(sc.mu, sc.lips, 1.0);
  EXPECT_EQ(choose_tau(sc, 0.5 * c, 1.0), 2);
  EXPECT_EQ(choose_tau(sc, 2.0 * c, 1.0), 1);
  EXPECT_EQ(choose_tau(testbed::worst_case_convex(1.0, 3, 3), 0.0, 1.0), 1);
}

TEST(NMax, Examples) {
  EXPECT_EQ(n_max(4.0, 1.0, 0.02), 20);
  EXPECT_EQ(n_max(2.0, 1.0, 2.0), 2);
  for (const double L : {1.0, 3.0, 10.0}) {
    const long a = n_max(L, 2.0, 1e-3), b = n_max(4.0 * L, 2.0, 1e-3);
    EXPECT_LE(std::abs(b - 2 * a), 1);
  }
  EXPECT_THROW(n_max(1.0, 1.0, 0.0), std::invalid_argument);
}

struct StopFixture {
  testbed::Instance inst = testbed::instance(testbed::spec::WorstCaseConvex{1.0, 10, 20});
  double L = 2.0 * inst.problem.lips;
  double eps = 1e-3 * L * inst.R * inst.R;
  long nmax = n_max(L, inst.R, eps);
  double delta = std::min(std::sqrt(L * eps / (3.0 * double(nmax + 1))), eps / (9.0 * inst.R));
};

TEST(StopRules, ZeroDeltaReducesToEpsTest) {
  const Problem p = testbed::worst_case_convex(1.0, 5, 5);
  const StmParams params = make_stm_params(p, 1, 0);
  RngStream rng(14);
  StmState s = stm_init(p, oracle::Exact{}, params, Vector::Zero(5), rng);
  for (int k = 0; k < 20; ++k) s = stm_step(std::move(s), params, p, oracle::Exact{}, rng);
  const double gap = s.f_x - *p.known_min;
  for (const double eps : {0.5 * gap, 2.0 * gap}) {
    const bool expected = gap <= eps;
    EXPECT_EQ(stop_known_fstar(s, params, p, *p.known_min, 1.0, eps, 0.0), expected);
    EXPECT_EQ(stop_adaptive(s, params, p, *p.known_min, 1.0, eps, 0.0), expected);
  }
}

TEST(StopRules, KnownFstarFiresWithinNmaxAndKeepsTrajectoryBounded) {
  StopFixture f;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RngStream rng(seed);
    const StmParams params = make_stm_params(
        f.inst.problem, 1, f.nmax, stop::KnownFstar{f.eps, f.inst.R, *f.inst.problem.known_min, f.delta});
    const Trace t = run(f.inst.problem, oracle::Absolute{f.delta}, params, f.inst.x_start, rng);
    ASSERT_EQ(t.status, RunStatus::Stopped);
    EXPECT_TRUE(t.back().stopped);
    EXPECT_LE(t.back().k, f.nmax);
    for (std::size_t i = 0; i + 1 < t.records.size(); ++i) {
      EXPECT_LE(t.records[i].r_tilde_k, f.inst.R * (1.0 + 1e-9));
    }
    const double certified = f.delta * f.delta / f.L * double(f.nmax + 1) + 3.0 * f.inst.R * f.delta + f.eps;
    EXPECT_LE(*t.back().f_gap, certified);
  }
}

TEST(StopRules, AdaptiveFiresWithinNmaxWithPostHocCertificate) {
  StopFixture f;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RngStream rng(seed);
    const StmParams params = make_stm_params(
        f.inst.problem, 1, f.nmax, stop::Adaptive{f.eps, f.inst.R, *f.inst.problem.known_min, f.delta});
    const Trace t = run(f.inst.problem, oracle::Absolute{f.delta}, params, f.inst.x_start, rng);
    ASSERT_EQ(t.status, RunStatus::Stopped);
    const long k = t.back().k;
    EXPECT_LE(k, f.nmax);
    EXPECT_LE(*t.back().f_gap,
              f.delta * f.delta / f.L * double(k + 1) + 3.0 * f.inst.R * f.delta + f.eps);
  }
}

TEST(StopRules, StopWinsTieWithMaxIters) {
  StopFixture f;
  RngStream probe(3);
  const Trace free_run = run(
      f.inst.problem, oracle::Exact{},
      make_stm_params(f.inst.problem, 1, f.nmax, stop::KnownFstar{f.eps, f.inst.R, *f.inst.problem.known_min, 0.0}),
      f.inst.x_start, probe);
  ASSERT_EQ(free_run.status, RunStatus::Stopped);
  const long k = free_run.back().k;
  RngStream rng(3);
  const Trace capped = run(
      f.inst.problem, oracle::Exact{},
      make_stm_params(f.inst.problem, 1, k, stop::KnownFstar{f.eps, f.inst.R, *f.inst.problem.known_min, 0.0}),
      f.inst.x_start, rng);
  EXPECT_EQ(capped.status, RunStatus::Stopped);
  EXPECT_TRUE(capped.back().stopped);
  EXPECT_EQ(capped.back().k, k);
}

TEST(StopRules, RequireANoiseLevel) {
  const auto inst = testbed::instance(testbed::spec::WorstCaseConvex{1.0, 5, 5});
  RngStream rng(15);
  EXPECT_THROW(run(inst.problem, oracle::Relative{0.1},
                   make_stm_params(inst.problem, 1, 10, stop::KnownFstar{0.1, 1.0, 0.0, std::nullopt}),
                   inst.x_start, rng),
               std::invalid_argument);
  EXPECT_THROW(run(inst.problem, oracle::Exact{},
                   make_stm_params(inst.problem, 1, 10, stop::KnownFstar{0.0, 1.0, 0.0, 0.1}),
                   inst.x_start, rng),
               std::invalid_argument);
}

TEST(StopRules, FiniteDifferenceModeUsesWidenedTolerance) {
  const auto inst = testbed::instance(testbed::spec::WorstCaseConvex{1.0, 5, 5});
  const double fstar = *inst.problem.known_min;
  const double eps = 1e-3, delta_f = 1e-4;
  RngStream rng(16);
  const Trace t = run(inst.problem, oracle::FiniteDifference{1e-2, delta_f},
                      make_stm_params(inst.problem, 1, 5000,
                                      stop::KnownFstar{eps, inst.R, fstar, 1e-2}),
                      inst.x_start, rng);
  ASSERT_EQ(t.status, RunStatus::Stopped);
  // The observed value is within delta_f of the true one, so the true gap obeys the
  // rule with eps widened by 2 delta_f plus that observation error.
  const double d = 1e-2;
  EXPECT_LE(*t.back().f_gap, d * d / (2.0 * inst.problem.lips) * double(t.back().k + 1) +
                                 3.0 * inst.R * d + eps + 3.0 * delta_f);
}

TEST(Regularize, GradientAtAnchorUnchanged) {
  const Problem p = testbed::worst_case_convex(1.0, 5, 8);
  RngStream data(17);
  const Vector anchor = test::random_vector(data, 8);
  const Problem r = regularize(p, 0.3, anchor);
  EXPECT_EQ(r.grad(anchor), p.grad(anchor));
  EXPECT_DOUBLE_EQ(r.lips, p.lips + 0.3);
  EXPECT_DOUBLE_EQ(r.mu, 0.3);
}

TEST(Regularize, StrongRegularizerBehavesLikeStronglyConvexSolve) {
  const auto inst = testbed::instance(testbed::spec::WorstCaseConvex{1.0, 5, 10});
  const double eps = 30.0 * inst.R * inst.R;  // mu = 20 >> L_f = 1
  RngStream rng(18);
  const auto out = solve_regularized(inst.problem, oracle::Exact{}, eps, inst.R, inst.x_start, 200, rng);
  EXPECT_GT(out.mu, inst.problem.lips);
  // The regularized minimizer is within L_f R / mu of the anchor, and STM reaches it.
  EXPECT_LT(out.trace.final_point.norm(), inst.problem.lips * inst.R / out.mu);
  EXPECT_LE(*out.trace.back().f_gap, eps);
}

TEST(Regularize, TerminalGapWithinBoundPlusBias) {
  const auto inst = testbed::instance(testbed::spec::WorstCaseConvex{1.0, 10, 50});
  const double eps = 0.05, delta = 1e-3;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    RngStream rng(seed);
    const auto out =
        solve_regularized(inst.problem, oracle::Absolute{delta}, eps, inst.R, inst.x_start, 3000, rng);
    EXPECT_NEAR(out.mu, (2.0 / 3.0) * eps / (inst.R * inst.R), 1e-15);
    for (const auto& r : out.trace.records) {
      EXPECT_LE(*r.f_gap,
                bounds::regularized_bound(inst.problem.lips, out.mu, inst.R, delta, r.k));
    }
  }
}

TEST(Regularize, Validation) {
  const auto inst = testbed::instance(testbed::spec::WorstCaseConvex{1.0, 3, 3});
  RngStream rng(19);
  EXPECT_THROW(solve_regularized(inst.problem, oracle::Exact{}, 0.0, 1.0, inst.x_start, 5, rng),
               std::invalid_argument);
  const Problem sc = testbed::worst_case_strongly_convex(0.1, 10.0, 3);
  EXPECT_THROW(solve_regularized(sc, oracle::Exact{}, 0.1, 1.0, Vector::Zero(3), 5, rng),
               std::invalid_argument);
}

}  // namespace
}  // namespace iagm
