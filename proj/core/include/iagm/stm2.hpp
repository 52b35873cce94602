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

#include "iagm/oracle.hpp"
#include "iagm/problem.hpp"
#include "iagm/rng.hpp"
#include "iagm/trace.hpp"
#include "iagm/vector.hpp"

namespace iagm {

/// State of the second accelerated variant (relative noise, unconstrained,
/// strongly convex). Weights use the same rescaling as StmState.
struct Stm2State {
  long k = 0;
  double A = 0.0;
  double alpha = 0.0;
  double anchor_weight = 1.0;
  double log_scale = 0.0;
  Vector y;
  Vector u;
  Vector x;
  double mu2 = 0.0;  ///< mu / 2
  double L = 0.0;    ///< 2 L_f
  Vector last_grad;  ///< inexact gradient used at y_k

  double true_A() const;
  double true_alpha() const;
};

using Stm2Observer = std::function<void(const Stm2State& prev, const Stm2State& next)>;

/// y_0 = u_0 = x_0 = x_start, A_0 = alpha_0 = 1/L. Throws unless mu > 0 and Q = R^n.
Stm2State stm2_init(const Problem& problem, const Vector& x_start);

Stm2State stm2_step(Stm2State state, const Problem& problem, const GradientOracle& oracle,
                    RngStream& rng);

/// Closed-form argmin of phi_k: ((1 + mu2 A_{k-1}) u_{k-1} + mu2 alpha_k y_k - alpha_k g) / (1 + mu2 A_k).
Vector stm2_u_update(const Vector& u_prev, const Vector& y, const Vector& g, double A_prev,
                     double alpha, double mu2, double weight = 1.0);

/// Records f(y_k) - f* per iteration.
Trace run2(const Problem& problem, const GradientOracle& oracle, const Vector& x_start,
           long max_iters, RngStream& rng, const Stm2Observer& observer = {});

/// Largest relative noise level with a guaranteed accelerated rate: mu / (28 L_f).
double max_alpha_relative(double mu, double L_f);

}  // namespace iagm
